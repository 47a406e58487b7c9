#include "curirl/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "curirl/error.hpp"
#include "curirl/rng.hpp"
#include "curirl/text_io.hpp"

namespace curirl {

namespace {

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::size_t column_index(const std::vector<std::string_view>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), std::string_view(name));
    if (it == header.end()) fail(ErrorKind::schema, "missing column \"" + name + "\"");
    return static_cast<std::size_t>(it - header.begin());
}

double cell_value(const std::vector<std::string_view>& cells, std::size_t col, std::size_t row,
                  const std::string& name) {
    double v = 0.0;
    if (col >= cells.size() || !parse_double(cells[col], v) || !std::isfinite(v))
        fail(ErrorKind::parse, "row " + std::to_string(row) + ", column \"" + name + "\": not a number");
    return v;
}

} // namespace

ParsedCsv parse_csv_file(std::istream& source, const CsvSchema& schema) {
    require(schema.x_column != schema.z_column, ErrorKind::schema, "x and z columns must differ");
    std::string line;
    if (!std::getline(source, line)) fail(ErrorKind::empty_input, "table has no header");
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const std::string header_line = line;
    const auto header = split_row(header_line);
    const auto xi = column_index(header, schema.x_column);
    const auto zi = column_index(header, schema.z_column);
    std::optional<std::size_t> ti, si;
    if (schema.time_column) ti = column_index(header, *schema.time_column);
    if (schema.score_column) si = column_index(header, *schema.score_column);

    ParsedCsv out;
    std::size_t row = 0;
    while (std::getline(source, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_row(line);
        out.positions.push_back({cell_value(cells, xi, row, schema.x_column),
                                 cell_value(cells, zi, row, schema.z_column)});
        if (ti) out.times.push_back(cell_value(cells, *ti, row, *schema.time_column));
        if (si) out.score = cell_value(cells, *si, row, *schema.score_column);
    }
    if (out.positions.empty()) fail(ErrorKind::empty_input, "table has no data rows");
    return out;
}

ParsedCsv parse_csv_file(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    return parse_csv_file(in, schema);
}

std::optional<FileKey> parse_demo_filename(const std::string& filename) {
    if (!filename.ends_with(".csv")) return std::nullopt;
    const std::string stem = filename.substr(0, filename.size() - 4);
    const auto us = stem.rfind('_');
    if (us == std::string::npos || us == 0 || us + 1 == stem.size()) return std::nullopt;
    const std::string_view digits(stem.data() + us + 1, stem.size() - us - 1);
    int trial = 0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), trial);
    if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || trial < 1) return std::nullopt;
    return FileKey{stem.substr(0, us), trial};
}

std::string anonymize(const std::string& participant, const std::string& salt) {
    // FNV-1a over salt, a separator byte, and the name.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](unsigned char c) {
        h ^= c;
        h *= 0x100000001b3ULL;
    };
    for (unsigned char c : salt) feed(c);
    feed(0);
    for (unsigned char c : participant) feed(c);
    char buf[20];
    std::snprintf(buf, sizeof buf, "p%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Trajectory replay_trajectory(const std::vector<Position2>& positions, const std::vector<double>& times) {
    require(positions.size() >= 2, ErrorKind::empty_input, "replay needs at least two rows");
    Trajectory traj;
    traj.steps.reserve(positions.size() - 1);
    for (std::size_t t = 0; t + 1 < positions.size(); ++t) {
        TrajectoryStep step{positions[t], positions[t + 1] - positions[t], std::nullopt};
        if (!times.empty()) step.time = times[t] - times.front();
        traj.steps.push_back(step);
    }
    return traj;
}

DemoSet load_demo_set(const std::filesystem::path& directory, const CsvSchema& schema,
                      double environment_size, const LoadOptions& options) {
    require(environment_size > 0.0, ErrorKind::invalid_argument, "environment_size must be positive");
    std::error_code ec;
    if (!std::filesystem::is_directory(directory, ec))
        fail(ErrorKind::io, "not a directory: " + directory.string());

    auto warn = [&](const std::string& msg) {
        if (options.on_warning) options.on_warning(msg);
    };

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory))
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    // participant, then numeric trial, so ep_2 precedes ep_10; unparseable names sort last
    auto order_key = [](const std::filesystem::path& f) {
        const auto k = parse_demo_filename(f.filename().string());
        return std::make_tuple(!k, k ? k->participant : std::string{}, k ? k->trial : 0, f.filename().string());
    };
    std::sort(files.begin(), files.end(),
              [&](const auto& a, const auto& b) { return order_key(a) < order_key(b); });

    DemoSet demos;
    demos.environment_size = environment_size;
    std::uint64_t stream = 0;
    for (const auto& file : files) {
        const auto name = file.filename().string();
        const auto key = parse_demo_filename(name);
        if (!key) {
            warn("skipping " + name + ": expected <participant>_<trial>.csv");
            continue;
        }
        const ParsedCsv parsed = parse_csv_file(file, schema);
        const std::string token = anonymize(key->participant, options.salt);
        std::vector<Trajectory> trajs;
        if (options.mode == TrajectoryMode::replay) {
            if (parsed.positions.size() < 2) {
                warn("skipping " + name + ": a single row has no outgoing action");
                continue;
            }
            trajs.push_back(replay_trajectory(parsed.positions, parsed.times));
        } else {
            trajs = create_human_traj(parsed.positions, options.random_walk_length, 2,
                                      mix_seed(options.seed, stream++));
        }
        for (auto& t : trajs) {
            t.participant_id = token;
            t.trial_index = key->trial;
            t.score = parsed.score;
            demos.trajectories.push_back(std::move(t));
        }
    }
    if (demos.trajectories.empty())
        fail(ErrorKind::empty_input, "no loadable demonstration files in " + directory.string());
    return demos;
}

std::vector<Trajectory> create_human_traj(const std::vector<Position2>& pos_data, std::size_t traj_len,
                                          std::size_t state_dim, std::uint64_t seed) {
    require(state_dim == 2, ErrorKind::unsupported_dimension,
            "state_dim " + std::to_string(state_dim) + " (only 2 is supported)");
    require(traj_len >= 1, ErrorKind::invalid_argument, "traj_len must be >= 1");
    require(!pos_data.empty(), ErrorKind::empty_input, "pos_data is empty");
    constexpr double action_scale = 0.1;

    Rng rng(seed);
    std::vector<Trajectory> out;
    out.reserve(pos_data.size());
    for (std::size_t i = 0; i < pos_data.size(); ++i) {
        Trajectory traj;
        traj.participant_id = "individual_" + std::to_string(i);
        traj.steps.reserve(traj_len);
        Position2 state = pos_data[i];
        for (std::size_t t = 0; t < traj_len; ++t) {
            const double cx = rng.uniform(-1.0, 1.0);
            const double cz = rng.uniform(-1.0, 1.0);
            const Displacement2 action{cx * action_scale, cz * action_scale};
            traj.steps.push_back({state, action, std::nullopt});
            state = state + action;
        }
        out.push_back(std::move(traj));
    }
    return out;
}

void write_positions_csv(std::ostream& out, const std::vector<Position2>& states, const std::vector<double>& times) {
    out << (times.empty() ? "pos_x,pos_z\n" : "pos_x,pos_z,time\n");
    for (std::size_t i = 0; i < states.size(); ++i) {
        out << format_double(states[i].x) << ',' << format_double(states[i].z);
        if (!times.empty()) out << ',' << format_double(times[i]);
        out << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::optional<double> step_dt) {
    std::vector<Position2> states;
    states.reserve(traj.steps.size() + 1);
    for (const auto& s : traj.steps) states.push_back(s.state);
    states.push_back(traj.end_state());
    std::vector<double> times;
    if (step_dt)
        for (std::size_t i = 0; i < states.size(); ++i) times.push_back(static_cast<double>(i) * *step_dt);
    write_positions_csv(out, states, times);
}

} // namespace curirl
