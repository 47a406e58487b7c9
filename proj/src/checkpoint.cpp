#include "curirl/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "curirl/error.hpp"
#include "curirl/text_io.hpp"

namespace curirl {

namespace {

constexpr std::string_view magic = "curirl-checkpoint";

void write_values(std::ostream& out, std::string_view key, std::span<const double> values) {
    out << key << " =";
    for (double v : values) out << ' ' << format_double(v);
    out << '\n';
}

std::vector<std::string_view> tokens(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        const std::size_t start = i;
        while (i < text.size() && text[i] != ' ') ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

class Document {
public:
    explicit Document(std::istream& in) {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto body = trim(line);
            if (body.empty() || body.front() == '#') continue;
            const auto eq = body.find('=');
            if (eq == std::string_view::npos)
                fail(ErrorKind::parse, "checkpoint line " + std::to_string(lineno) + ": expected key = value");
            entries_[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
        }
    }

    const std::string& text(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) fail(ErrorKind::parse, "checkpoint is missing \"" + key + "\"");
        return it->second;
    }

    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        for (auto tok : tokens(text(key))) {
            double v = 0.0;
            if (!parse_double(tok, v)) fail(ErrorKind::parse, "checkpoint key \"" + key + "\": bad number");
            if (!std::isfinite(v)) fail(ErrorKind::numeric, "checkpoint key \"" + key + "\": non-finite value");
            out.push_back(v);
        }
        return out;
    }

    std::uint64_t integer(const std::string& key) const {
        const auto& t = text(key);
        std::uint64_t v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
            fail(ErrorKind::parse, "checkpoint key \"" + key + "\": expected an integer");
        return v;
    }

private:
    std::map<std::string, std::string> entries_;
};

} // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    validate(ckpt.model);
    const auto& m = ckpt.model;
    out << "format = " << magic << '\n';
    out << "version = " << checkpoint_format_version << '\n';
    out << "seed = " << ckpt.seed << '\n';
    out << "actions = " << m.action_count() << '\n';
    out << "hidden = " << m.hidden_dim() << '\n';
    const double norm[] = {m.input.offset_x, m.input.offset_z, m.input.scale};
    write_values(out, "input_normalization", norm);
    for (std::size_t i = 0; i < ParameterTensors::count; ++i) {
        const auto& b = m.params.blocks[i];
        const std::string name(ParameterTensors::names[i]);
        out << name << ".shape = " << b.rows << ' ' << b.cols << '\n';
        write_values(out, name, b.data);
    }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    save_checkpoint(out, ckpt);
    if (!out) fail(ErrorKind::io, "failed writing " + path.string());
}

Checkpoint load_checkpoint(std::istream& in) {
    const Document doc(in);
    if (doc.text("format") != magic) fail(ErrorKind::parse, "not a checkpoint document");
    const auto version = doc.integer("version");
    if (version != checkpoint_format_version)
        fail(ErrorKind::contract, "unsupported checkpoint version " + std::to_string(version));

    Checkpoint ckpt;
    ckpt.seed = doc.integer("seed");
    const auto actions = doc.integer("actions");
    const auto hidden = doc.integer("hidden");
    const auto norm = doc.numbers("input_normalization");
    if (norm.size() != 3) fail(ErrorKind::contract, "input_normalization needs 3 values");
    ckpt.model.input = {norm[0], norm[1], norm[2]};

    const std::size_t expected[ParameterTensors::count][2] = {
        {hidden, 2}, {hidden, 1}, {hidden, hidden}, {hidden, 1}, {actions, hidden}, {actions, 1}};
    for (std::size_t i = 0; i < ParameterTensors::count; ++i) {
        const std::string name(ParameterTensors::names[i]);
        const auto shape = doc.numbers(name + ".shape");
        if (shape.size() != 2 || shape[0] != static_cast<double>(expected[i][0]) ||
            shape[1] != static_cast<double>(expected[i][1]))
            fail(ErrorKind::contract, "block " + name + " has an unexpected shape");
        Tensor& t = ckpt.model.params.blocks[i];
        t.rows = expected[i][0];
        t.cols = expected[i][1];
        t.data = doc.numbers(name);
        if (t.data.size() != t.rows * t.cols)
            fail(ErrorKind::contract, "block " + name + " has " + std::to_string(t.data.size()) + " values, expected " +
                                          std::to_string(t.rows * t.cols));
    }
    validate(ckpt.model);
    return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    return load_checkpoint(in);
}

} // namespace curirl
