#include "nodalband/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nodalband/chaos.hpp"
#include "nodalband/errors.hpp"
#include "nodalband/field.hpp"
#include "nodalband/specfun.hpp"

namespace nodalband::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line, const std::string& key)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d))
            throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(line, key + ": expected a number, got '" + v + "'");
    }
}

long long to_int(const std::string& v, int line, const std::string& key)
{
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("");
        return i;
    } catch (const std::exception&) {
        throw ConfigError(line, key + ": expected an integer, got '" + v + "'");
    }
}

std::vector<std::string> split_list(std::string v)
{
    v = trim(v);
    if (!v.empty() && v.front() == '[' && v.back() == ']')
        v = v.substr(1, v.size() - 2);
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

std::optional<Command> parse_command(const std::string& s)
{
    if (s == "kernel-curve") return Command::kernel_curve;
    if (s == "kacrice-curve") return Command::kacrice_curve;
    if (s == "variance") return Command::variance;
    if (s == "mc-nodal") return Command::mc_nodal;
    if (s == "chaos2") return Command::chaos2;
    if (s == "selfcheck") return Command::selfcheck;
    return std::nullopt;
}

std::string to_string(Command c)
{
    switch (c) {
    case Command::kernel_curve: return "kernel-curve";
    case Command::kacrice_curve: return "kacrice-curve";
    case Command::variance: return "variance";
    case Command::mc_nodal: return "mc-nodal";
    case Command::chaos2: return "chaos2";
    case Command::selfcheck: return "selfcheck";
    }
    return "?";
}

double GRule::operator()(int n) const { return power ? std::pow(double(n), value) : value; }

std::string GRule::describe() const { return (power ? "power(" : "const(") + fmt(value) + ")"; }

ExperimentConfig parse_config(const std::string& text)
{
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::vector<std::string> seen;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty())
            continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigError(line, "empty key");
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ConfigError(line, "duplicate key '" + key + "'");
        seen.push_back(key);
        if (val.empty())
            throw ConfigError(line, key + ": empty value");

        if (key == "command") {
            cfg.command = parse_command(val);
            if (!cfg.command)
                throw ConfigError(line, "unknown command '" + val + "'");
        } else if (key == "n_list") {
            for (const auto& item : split_list(val)) {
                const long long n = to_int(item, line, key);
                if (n < 1 || n > 100000)
                    throw ConfigError(line, "n_list: n must lie in [1, 100000]");
                cfg.n_list.push_back(int(n));
            }
            if (cfg.n_list.empty())
                throw ConfigError(line, "n_list is empty");
        } else if (key == "g_rule") {
            const auto open = val.find('('), close = val.rfind(')');
            if (open == std::string::npos || close != val.size() - 1)
                throw ConfigError(line, "g_rule: expected const(x) or power(p)");
            const std::string kind = trim(val.substr(0, open));
            const double x = to_double(trim(val.substr(open + 1, close - open - 1)), line, key);
            if (kind == "const")
                cfg.g_rule = {false, x};
            else if (kind == "power")
                cfg.g_rule = {true, x};
            else
                throw ConfigError(line, "g_rule: unknown rule '" + kind + "'");
            cfg.has_g_rule = true;
        } else if (key == "psi_range") {
            const auto parts = split_list(val);
            if (parts.size() != 3)
                throw ConfigError(line, "psi_range: expected min, max, count");
            cfg.psi_min = to_double(parts[0], line, key);
            cfg.psi_max = to_double(parts[1], line, key);
            const long long c = to_int(parts[2], line, key);
            if (cfg.psi_min <= 0)
                throw ConfigError(line, "psi_range: min must be positive");
            if (cfg.psi_max < cfg.psi_min)
                throw ConfigError(line, "psi_range: max below min");
            if (c < 1 || c > 1000000)
                throw ConfigError(line, "psi_range: count out of range");
            cfg.psi_count = int(c);
        } else if (key == "samples") {
            cfg.samples = long(to_int(val, line, key));
            if (cfg.samples < 0)
                throw ConfigError(line, "samples must be nonnegative");
        } else if (key == "mesh_level") {
            const long long lv = to_int(val, line, key);
            if (lv < 0 || lv > 10)
                throw ConfigError(line, "mesh_level must lie in [0, 10]");
            cfg.mesh_level = int(lv);
        } else if (key == "seed") {
            const long long sd = to_int(val, line, key);
            if (sd < 0)
                throw ConfigError(line, "seed must be nonnegative");
            cfg.seed = std::uint64_t(sd);
        } else if (key == "tol") {
            cfg.tol = to_double(val, line, key);
            if (!(cfg.tol > 0 && cfg.tol < 1))
                throw ConfigError(line, "tol must lie in (0, 1)");
        } else if (key == "out_path") {
            cfg.out_path = val;
        } else if (key == "dump_path") {
            cfg.dump_path = val;
        } else if (key == "format") {
            if (val == "csv")
                cfg.format = Format::csv;
            else if (val == "json")
                cfg.format = Format::json;
            else
                throw ConfigError(line, "format must be csv or json");
        } else if (key == "threads") {
            const long long t = to_int(val, line, key);
            if (t < 0 || t > 1024)
                throw ConfigError(line, "threads must lie in [0, 1024]");
            cfg.threads = int(t);
        } else if (key == "domain") {
            if (val == "hemisphere")
                cfg.domain = Domain::hemisphere;
            else if (val == "sphere")
                cfg.domain = Domain::sphere;
            else
                throw ConfigError(line, "domain must be hemisphere or sphere");
        } else if (key == "k_method") {
            if (val == "oracle")
                cfg.k_method = KMethod::oracle;
            else if (val == "series")
                cfg.k_method = KMethod::series;
            else
                throw ConfigError(line, "k_method must be oracle or series");
        } else {
            throw ConfigError(line, "unknown key '" + key + "'");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError(0, "cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg, Command cmd)
{
    if (cfg.command && *cfg.command != cmd)
        throw ConfigError(0, "config command '" + to_string(*cfg.command) + "' differs from '" + to_string(cmd) + "'");
    if (cmd == Command::selfcheck)
        return;
    if (cfg.n_list.empty())
        throw ConfigError(0, "n_list is required");
    if (!cfg.has_g_rule)
        throw ConfigError(0, "g_rule is required");
    for (int n : cfg.n_list) {
        const double g = cfg.g_rule(n);
        if (!(g > 0 && g < 1))
            throw ConfigError(0, "g_rule gives g = " + fmt(g) + " outside (0, 1) at n = " + std::to_string(n));
    }
    if (cmd == Command::mc_nodal) {
        if (!cfg.seed)
            throw ConfigError(0, "mc-nodal needs an explicit seed");
        if (cfg.samples < 2)
            throw ConfigError(0, "mc-nodal needs samples >= 2");
    }
    if (cmd == Command::chaos2 && cfg.samples > 0 && !cfg.seed)
        throw ConfigError(0, "chaos2 with samples > 0 needs an explicit seed");
}

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string to_csv(const Table& t)
{
    std::ostringstream os;
    os << "# schema=1\r\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << csv_escape(t.columns[i]);
    os << "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                os << ',';
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, std::string>)
                        os << csv_escape(v);
                    else if constexpr (std::is_same_v<V, double>)
                        os << fmt(v);
                    else
                        os << v;
                },
                row[i]);
        }
        os << "\r\n";
    }
    return os.str();
}

std::string to_json(const Table& t)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i)
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        if (std::isfinite(v))
                            obj[t.columns[i]] = v;
                        else
                            obj[t.columns[i]] = nullptr;
                    } else {
                        obj[t.columns[i]] = v;
                    }
                },
                row[i]);
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

namespace {

std::vector<double> psi_grid(const ExperimentConfig& cfg)
{
    std::vector<double> g(cfg.psi_count);
    for (int i = 0; i < cfg.psi_count; ++i)
        g[i] = cfg.psi_count == 1 ? cfg.psi_min
                                  : cfg.psi_min + (cfg.psi_max - cfg.psi_min) * i / double(cfg.psi_count - 1);
    return g;
}

RunResult kernel_curve(const ExperimentConfig& cfg)
{
    RunResult r;
    r.table.columns = {"n", "g", "L0", "psi", "theta", "gamma_exact", "gamma_cd", "gamma_asym", "residual_cd",
                       "residual_asym", "regime_warning"};
    for (int n : cfg.n_list) {
        const BandWindow w = make_window(n, cfg.g_rule(n));
        for (double psi : psi_grid(cfg)) {
            const double th = w.theta_of(psi);
            if (th >= kPi)
                continue;
            const double ge = gamma_exact(w, th).gamma, gc = gamma_cd(w, th).gamma;
            const AsymValue ga = gamma_asym(w, psi);
            r.table.rows.push_back({(long long)n, w.g, (long long)w.L0, psi, th, ge, gc, ga.value, gc - ge,
                                    ga.value - ge, (long long)ga.regime_warning});
        }
    }
    return r;
}

RunResult kacrice_curve(const ExperimentConfig& cfg)
{
    RunResult r;
    r.table.columns = {"n", "g", "psi", "k_series", "k_oracle", "k_asym", "residual_series", "residual_asym",
                       "regime_warning"};
    for (int n : cfg.n_list) {
        const BandWindow w = make_window(n, cfg.g_rule(n));
        for (double psi : psi_grid(cfg)) {
            if (w.theta_of(psi) >= kPi)
                continue;
            const double ks = k_twopoint(w, psi, KMethod::series);
            const double ko = k_twopoint(w, psi, KMethod::oracle);
            const KAsym ka = k_asymptotic(w, psi);
            r.table.rows.push_back({(long long)n, w.g, psi, ks, ko, ka.value, ks - ko, ka.value - ko,
                                    (long long)ka.regime_warning});
        }
    }
    return r;
}

RunResult variance_rows(const ExperimentConfig& cfg)
{
    RunResult r;
    r.table.columns = {"n", "g", "L0", "domain", "k_method", "tol", "I1", "I2", "total", "log_n_over_32",
                       "quad_error", "evaluations", "converged", "wall_time"};
    for (int n : cfg.n_list) {
        const BandWindow w = make_window(n, cfg.g_rule(n));
        VarianceOptions o;
        o.tol = cfg.tol;
        o.domain = cfg.domain;
        o.method = cfg.k_method;
        o.threads = cfg.threads;
        const VarianceReport v = variance_integral(w, o);
        if (!v.converged)
            r.status = 1;
        r.table.rows.push_back({(long long)n, w.g, (long long)w.L0,
                                std::string(cfg.domain == Domain::sphere ? "sphere" : "hemisphere"),
                                std::string(cfg.k_method == KMethod::series ? "series" : "oracle"), cfg.tol, v.I1,
                                v.I2, v.total, v.leading, v.quad_error, (long long)v.evaluations,
                                (long long)v.converged, v.wall_time});
    }
    return r;
}

RunResult mc_nodal(const ExperimentConfig& cfg)
{
    RunResult r;
    r.table.columns = {"n", "g", "seed", "samples", "mesh_level", "mesh_vertices", "mean_length", "mean_formula",
                       "stderr_mean", "var_length", "stderr_var", "discretization_note"};
    std::string dump;
    for (int n : cfg.n_list) {
        const BandWindow w = make_window(n, cfg.g_rule(n));
        const int level = cfg.mesh_level >= 0 ? cfg.mesh_level : min_mesh_level(w);
        const NodalStats st = mc_nodal_stats(w, cfg.samples, level, *cfg.seed, cfg.threads);
        r.table.rows.push_back({(long long)n, w.g, (long long)*cfg.seed, (long long)st.n_samples,
                                (long long)st.mesh_level, (long long)st.mesh_resolution, st.mean_length,
                                mean_nodal_length(w), st.stderr_mean, st.var_length, st.stderr_var,
                                st.discretization_note});
        if (!cfg.dump_path.empty()) {
            const std::string part = lengths_csv(st);
            dump += dump.empty() ? part : part.substr(part.find('\n') + 1);
        }
    }
    if (!cfg.dump_path.empty()) {
        std::ofstream f(cfg.dump_path, std::ios::binary);
        f << dump;
    }
    return r;
}

RunResult chaos_rows(const ExperimentConfig& cfg)
{
    RunResult r;
    r.table.columns = {"n", "g", "var2_exact", "var2_asym", "ratio", "seed", "samples", "h2_var", "h2_var_stderr",
                       "h2_var_oracle", "h4_var", "h4_var_stderr"};
    for (int n : cfg.n_list) {
        const BandWindow w = make_window(n, cfg.g_rule(n));
        const ChaosReport c = chaos_report(w);
        std::vector<Cell> row = {(long long)n, w.g, c.var2_exact, c.var2_asym, c.ratio};
        if (cfg.samples > 0) {
            const int level = cfg.mesh_level >= 0 ? cfg.mesh_level : min_mesh_level(w);
            const HermiteStats h = mc_hermite_stats(w, cfg.samples, level, *cfg.seed, cfg.threads);
            row.insert(row.end(), {(long long)*cfg.seed, (long long)cfg.samples, h.h2_var, h.h2_var_stderr,
                                   h2_variance_oracle(w), h.h4_var, h.h4_var_stderr});
        } else {
            const double nan = std::nan("");
            row.insert(row.end(), {std::string(""), 0LL, nan, nan, nan, nan, nan});
        }
        r.table.rows.push_back(std::move(row));
    }
    return r;
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

double rel(double a, double b, double scale) { return std::abs(a - b) / scale; }

std::vector<Check> selfchecks(int threads)
{
    std::vector<Check> out;
    auto add = [&](std::string name, bool pass, std::string detail) {
        out.push_back({std::move(name), pass, std::move(detail)});
    };

    {   // Christoffel-Darboux form against the exact sum
        double worst = 0;
        for (int n : {10, 50, 200}) {
            const BandWindow w = make_window(n, 0.2);
            for (int i = 1; i <= 20; ++i) {
                const double th = kPi / 2 * i / 20.0;
                const KernelValues e = gamma_exact(w, th), c = gamma_cd(w, th);
                worst = std::max({worst, rel(e.gamma, c.gamma, 1.0), rel(e.dgamma, c.dgamma, std::sqrt(w.D)),
                                  rel(e.ddgamma, c.ddgamma, w.D)});
            }
        }
        add("kernel_cd_matches_exact", worst <= 1e-9, "max scaled error " + fmt(worst));
    }
    {
        double worst = 0;
        for (int n : {10, 200, 1000})
            worst = std::max(worst, std::abs(gamma_exact(make_window(n, 0.1), 0.0).gamma - 1.0));
        add("kernel_normalized_at_zero", worst <= 1e-13, "max |gamma(0) - 1| " + fmt(worst));
    }
    {
        double worst = 0;
        for (int l : {3, 40, 300})
            for (double x : {-0.9, -0.3, 0.2, 0.7, 0.99}) {
                double s = 0;
                for (int k = 0; k <= l; ++k)
                    s += (2 * k + 1) * specfun::legendre_p(k, x);
                worst = std::max(worst, rel(s, (l + 1) * specfun::jacobi_p(l, 1, 0, x), std::abs(s) + 1));
            }
        add("legendre_jacobi_sum_identity", worst <= 1e-9, "max rel error " + fmt(worst));
    }
    {   // quadrature and Monte Carlo oracles on one covariance
        const ConditionalCovariance cov = covariance_from_abc(-0.1, 0.05, 0.02);
        OracleOptions q;
        OracleOptions m;
        m.method = OracleMethod::monte_carlo;
        m.samples = 400000;
        m.seed = 3;
        m.threads = threads;
        const OracleValue vq = norm_product_oracle(cov, q), vm = norm_product_oracle(cov, m);
        add("oracle_quadrature_vs_monte_carlo", std::abs(vq.value - vm.value) <= 4 * vm.stderr_,
            fmt(vq.value) + " vs " + fmt(vm.value) + " +- " + fmt(vm.stderr_));
        const double ser = norm_product_series(-0.1, 0.05, 0.02).value;
        const double bound = 10 * (1e-3 + std::pow(0.05, 5) + 4e-4);
        add("norm_product_series_vs_oracle", std::abs(ser - vq.value) <= bound,
            "difference " + fmt(ser - vq.value) + " bound " + fmt(bound));
    }
    {
        const BandWindow w = make_window(100, 0.1);
        double worst = 1.0;
        for (double th : {0.05, 0.3, 1.0, 2.0, 3.0}) {
            const auto c = conditional_covariance(w, th);
            worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(c.delta).eigenvalues().minCoeff());
        }
        add("conditional_covariance_psd", worst >= -1e-10, "min eigenvalue " + fmt(worst));
    }
    {   // variance over the whole sphere and the second moment are independent routes
        const BandWindow w = make_window(40, 0.25);
        VarianceOptions o;
        o.domain = Domain::sphere;
        o.threads = threads;
        const VarianceReport v = variance_integral(w, o);
        const SecondMoment s = second_moment(w, 1e-8, threads);
        const double alt = s.value - s.mean * s.mean;
        add("variance_matches_second_moment", v.converged && std::abs(v.total - alt) <= 1e-3 * std::abs(alt) + 1e-4,
            fmt(v.total) + " vs " + fmt(alt));
    }
    {
        const PowerSums p = power_sums(1, 10);
        const PowerSums q = power_sums(1, 100000);
        const bool ok = p.s1 == 7260 && p.s2 == 580800 && q.s1 == s1_closed(100000) && q.s2 == s2_closed(100000);
        add("power_sum_closed_forms", ok, "s1(10) = " + nodalband::to_string(p.s1) + ", s2(10) = " + nodalband::to_string(p.s2));
    }
    {   // closed-form C^2 against the realized sum when (1-g) n is an integer
        const BandWindow w = make_window(1000, 0.05);
        const double a = 1 - w.g;
        const double csq = 4 * kPi / (1000.0 * 1000 * (1 - a * a) + 2 * 1000 + 1);
        const double e1 = chaos2_variance_exact(w), e2 = chaos2_variance_exact(w, csq);
        add("chaos2_normalization_consistent", rel(e1, e2, e1) <= 1e-9, fmt(e1) + " vs " + fmt(e2));
    }
    {
        const Mesh m = build_mesh(3);
        double s = 0, worst = 0;
        for (std::size_t i = 0; i < m.vertices.size(); ++i) {
            s += m.weights[i];
            const auto& v = m.vertices[i];
            worst = std::max(worst, std::abs(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - 1));
        }
        add("mesh_weights_and_vertices", m.vertices.size() == 642 && std::abs(s - 4 * kPi) <= 1e-12 && worst <= 1e-14,
            "vertices " + std::to_string(m.vertices.size()) + ", weight sum - 4pi " + fmt(s - 4 * kPi));
    }
    {   // equator of the axial l = 1 harmonic
        const BandWindow w = make_band(1, 1);
        FieldSample s;
        s.window = w;
        s.coeffs.assign(3, 0.0);
        s.coeffs[s.index(1, 0)] = 1.0;
        const Mesh m = build_mesh(5);
        const double len = nodal_length(evaluate_field(s, m.vertices), m);
        add("equator_length", std::abs(len - 2 * kPi) <= 0.01 * 2 * kPi, "length " + fmt(len));
    }
    return out;
}

RunResult selfcheck(const ExperimentConfig& cfg, std::ostream& log)
{
    RunResult r;
    r.table.columns = {"invariant", "status", "detail"};
    for (const Check& c : selfchecks(cfg.threads)) {
        log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        r.table.rows.push_back({c.name, std::string(c.pass ? "PASS" : "FAIL"), c.detail});
        if (!c.pass)
            r.status = 1;
    }
    return r;
}

} // namespace

RunResult run(const ExperimentConfig& cfg, Command cmd, std::ostream& log)
{
    validate(cfg, cmd);
    switch (cmd) {
    case Command::kernel_curve: return kernel_curve(cfg);
    case Command::kacrice_curve: return kacrice_curve(cfg);
    case Command::variance: return variance_rows(cfg);
    case Command::mc_nodal: return mc_nodal(cfg);
    case Command::chaos2: return chaos_rows(cfg);
    case Command::selfcheck: return selfcheck(cfg, log);
    }
    return {};
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"nodal length of band-limited spherical Gaussian fields"};
    std::string command, config_path, out_path;
    app.add_option("command", command, "kernel-curve | kacrice-curve | variance | mc-nodal | chaos2 | selfcheck")
        ->required();
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--out", out_path, "output file (overrides out_path)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }
    const auto cmd = parse_command(command);
    if (!cmd) {
        err << "unknown command '" << command << "'\n";
        return 2;
    }
    ExperimentConfig cfg;
    try {
        if (!config_path.empty())
            cfg = load_config(config_path);
        else if (*cmd != Command::selfcheck)
            throw ConfigError(0, "--config is required for " + command);
        if (!out_path.empty())
            cfg.out_path = out_path;
        validate(cfg, *cmd);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    }
    RunResult res;
    try {
        res = run(cfg, *cmd, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConstructionError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    const std::string body = cfg.format == Format::json ? to_json(res.table) : to_csv(res.table);
    if (cfg.out_path.empty()) {
        out << body;
    } else {
        std::ofstream f(cfg.out_path, std::ios::binary);
        if (!f) {
            err << "cannot write '" << cfg.out_path << "'\n";
            return 1;
        }
        f << body;
    }
    return res.status;
}

} // namespace nodalband::cli
