#pragma once

#include <iosfwd>
#include <json.hpp>
#include <optional>

#include "srflat/flatness.hpp"

namespace srflat {

// Parse failures carry the JSON path of the offending field, e.g. "frame[1][2]".
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ManifoldSpec {
    std::string name, description;
    Mode mode = Mode::Coordinates;
    SpacePtr space;
    std::optional<FrameField> frame;
    std::vector<std::string> frame_names;
    std::optional<Metric> metric;
    std::vector<std::vector<mpq_class>> points;
};

ManifoldSpec parse_manifold_spec(const std::string& text);
StratifiedAlgebra parse_algebra(const std::string& text);
ManifoldSpec load_manifold_spec(const std::string& path);
StratifiedAlgebra load_algebra(const std::string& path);
std::string read_file(const std::string& path);

std::string sha256_hex(const std::string& bytes);
// "a/b" or "a"; also accepts decimals like "0.25".
mpq_class parse_rational(const std::string& s);

struct Report {
    std::string command;
    std::string input_digest;
    SampleConfig config;
    std::optional<std::string> verdict;
    nlohmann::ordered_json result = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, std::string>> transcript;
    std::vector<std::string> warnings;
    double timing_ms = 0;
    int exit_code = 0;
};

nlohmann::ordered_json to_json(const Report& r, bool timing = true);
std::string to_text(const Report& r);

// argv without the program name. Exit 0 = success/Flat, 1 = NotFlat/fail, 2 = error/Undecided.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srflat
