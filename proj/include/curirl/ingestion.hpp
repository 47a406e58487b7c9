#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "curirl/domain.hpp"

namespace curirl {

struct CsvSchema {
    std::string x_column = "pos_x";
    std::string z_column = "pos_z";
    std::optional<std::string> time_column;
    std::optional<std::string> score_column;
};

struct ParsedCsv {
    std::vector<Position2> positions;
    std::vector<double> times;   // empty unless the schema names a time column
    std::optional<double> score; // last row's score cell, when a score column is named
};

/// Reads a header-bearing comma-separated table. Rows are returned in file
/// order without dedup or resampling. Row numbers in errors count data rows from 1.
ParsedCsv parse_csv_file(std::istream& source, const CsvSchema& schema = {});
ParsedCsv parse_csv_file(const std::filesystem::path& path, const CsvSchema& schema = {});

enum class TrajectoryMode {
    replay,      // actions are deltas between consecutive rows; last row is terminal
    random_walk, // one random-walk trajectory per row (see create_human_traj)
};

struct LoadOptions {
    TrajectoryMode mode = TrajectoryMode::replay;
    std::size_t random_walk_length = 20;
    std::uint64_t seed = 0;
    std::string salt = "curirl";
    std::function<void(const std::string&)> on_warning;
};

/// Loads every `<participant>_<trial>.csv` in `directory`, ordered by participant then numeric trial.
/// Unparseable names and files too short for one step are skipped with a warning.
DemoSet load_demo_set(const std::filesystem::path& directory, const CsvSchema& schema,
                      double environment_size, const LoadOptions& options = {});

struct FileKey {
    std::string participant;
    int trial = 0;
};

/// Splits `<participant>_<trial>.csv` at the last underscore.
std::optional<FileKey> parse_demo_filename(const std::string& filename);

/// Stable token for a participant name; raw names never leave ingestion.
std::string anonymize(const std::string& participant, const std::string& salt);

/// One random-walk trajectory per start position. Each step draws coefficients
/// uniformly from [-1, 1)^2 (Rng, seeded), scales them by 0.1, records
/// (state, action) and advances state += action.
std::vector<Trajectory> create_human_traj(const std::vector<Position2>& pos_data, std::size_t traj_len,
                                          std::size_t state_dim, std::uint64_t seed);

/// Replay trajectory from consecutive positions (requires >= 2 rows).
Trajectory replay_trajectory(const std::vector<Position2>& positions, const std::vector<double>& times = {});

/// Writes states as a pos_x,pos_z[,time] table that parse_csv_file reads back exactly.
void write_positions_csv(std::ostream& out, const std::vector<Position2>& states,
                         const std::vector<double>& times = {});
/// Writes the trajectory's states followed by its end state.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::optional<double> step_dt = {});

} // namespace curirl
