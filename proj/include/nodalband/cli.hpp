#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nodalband/kacrice.hpp"

namespace nodalband::cli {

enum class Command { kernel_curve, kacrice_curve, variance, mc_nodal, chaos2, selfcheck };
enum class Format { csv, json };

std::optional<Command> parse_command(const std::string& s);
std::string to_string(Command c);

// g(n) = value, or g(n) = n^value
struct GRule {
    bool power = false;
    double value = 0.0;
    double operator()(int n) const;
    std::string describe() const;
};

struct ExperimentConfig {
    std::optional<Command> command;
    std::vector<int> n_list;
    GRule g_rule{false, 0.0};
    bool has_g_rule = false;
    double psi_min = 5.0, psi_max = 50.0;
    int psi_count = 10;
    long samples = 0;
    int mesh_level = -1;  // -1: smallest admissible level
    std::optional<std::uint64_t> seed;
    double tol = 1e-6;
    std::string out_path;
    Format format = Format::csv;
    int threads = 1;
    Domain domain = Domain::sphere;  // hemisphere folds theta -> pi - theta, exact only for one parity
    KMethod k_method = KMethod::oracle;
    std::string dump_path;  // per-sample lengths for mc-nodal
};

// key = value lines, '#' starts a comment. Throws ConfigError with the line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Checks that do not depend on a single line (g range, required keys for the command).
void validate(const ExperimentConfig& cfg, Command cmd);

using Cell = std::variant<long long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string csv_escape(const std::string& s);
std::string to_csv(const Table& t);
std::string to_json(const Table& t);

struct RunResult {
    Table table;
    int status = 0;  // 0 ok, 1 invariant or convergence failure
};

RunResult run(const ExperimentConfig& cfg, Command cmd, std::ostream& log);

// Entry point used by the binary; returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace nodalband::cli
