#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nodalband/errors.hpp"
#include "nodalband/field.hpp"
#include "nodalband/specfun.hpp"

using namespace nodalband;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

namespace {

Vec3 unit(double th, double ph) { return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)}; }

Vec3 rotate(const Vec3& v, double a)  // about the x axis
{
    return {v[0], std::cos(a) * v[1] - std::sin(a) * v[2], std::sin(a) * v[1] + std::cos(a) * v[2]};
}

} // namespace

TEST_CASE("mesh sizes")
{
    const Mesh m0 = build_mesh(0);
    CHECK(m0.vertices.size() == 12);
    CHECK(m0.triangles.size() == 20);
    for (int lv = 0; lv <= 5; ++lv) {
        const Mesh m = build_mesh(lv);
        CHECK(m.vertices.size() == std::size_t(10 * (1 << (2 * lv)) + 2));
        CHECK(m.triangles.size() == std::size_t(20 * (1 << (2 * lv))));
    }
    CHECK(build_mesh(3).vertices.size() == 642);
    CHECK_THROWS_AS(build_mesh(-1), ConstructionError);
}

TEST_CASE("mesh vertices, weights and edges")
{
    const Mesh m = build_mesh(4);
    double s = 0;
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        const auto& v = m.vertices[i];
        CHECK(std::abs(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - 1) <= 1e-14);
        CHECK(m.weights[i] > 0);
        s += m.weights[i];
    }
    CHECK(s == Approx(4 * kPi).epsilon(1e-13));
    CHECK(m.max_edge < build_mesh(3).max_edge);
    CHECK(m.max_edge <= 1.2 * 1.1071487177940904 / 16);
}

TEST_CASE("mesh admissibility")
{
    const BandWindow w = make_window(10, 0.2);
    const int lv = min_mesh_level(w);
    CHECK(build_mesh(lv).max_edge <= max_admissible_edge(w));
    CHECK(build_mesh(lv - 1).max_edge > max_admissible_edge(w));
    CHECK_NOTHROW(check_mesh(build_mesh(lv), w));
    try {
        check_mesh(build_mesh(lv - 1), w);
        FAIL("coarse mesh accepted");
    } catch (const ConstructionError& e) {
        CHECK(std::string(e.what()).find("minimum admissible level is " + std::to_string(lv)) != std::string::npos);
    }
}

TEST_CASE("sample_field is deterministic and sized")
{
    const BandWindow w = make_window(30, 0.2);
    const FieldSample a = sample_field(w, 42), b = sample_field(w, 42), c = sample_field(w, 43);
    CHECK(a.coeffs.size() == std::size_t(w.modes));
    CHECK(a.coeffs == b.coeffs);
    CHECK(a.coeffs != c.coeffs);
    CHECK(sample_seed(1, 0) != sample_seed(1, 1));
    CHECK(sample_seed(1, 5) == sample_seed(1, 5));
}

TEST_CASE("evaluate_field single axial coefficient")
{
    for (int l : {1, 5, 12}) {
        const BandWindow w = make_band(l, l);
        FieldSample s;
        s.window = w;
        s.coeffs.assign(std::size_t(w.modes), 0.0);
        s.coeffs[s.index(l, 0)] = 1.0;
        const auto v = evaluate_field(s, {{0, 0, 1}, {0, 0, -1}, unit(0.7, 1.1)});
        const double norm = std::sqrt((2 * l + 1) / (4 * kPi));
        CHECK(v[0] == Approx(norm).epsilon(1e-13));
        CHECK(v[1] == Approx(l % 2 ? -norm : norm).epsilon(1e-13));
        CHECK(v[2] == Approx(norm * specfun::legendre_p(l, std::cos(0.7))).epsilon(1e-12));
    }
}

TEST_CASE("evaluate_field addition theorem")
{
    // with every coefficient of degree l set to one, the sum of Y_lm(x) Y_lm(y) is (2l+1)/(4 pi) P_l(x.y);
    // here each basis function is evaluated separately
    const int l = 9;
    const BandWindow w = make_band(l, l);
    const Vec3 x = unit(0.4, 0.3), y = unit(1.9, -2.2);
    double s = 0;
    for (int m = -l; m <= l; ++m) {
        FieldSample f;
        f.window = w;
        f.coeffs.assign(std::size_t(w.modes), 0.0);
        f.coeffs[f.index(l, m)] = 1.0;
        const auto v = evaluate_field(f, {x, y});
        s += v[0] * v[1];
    }
    const double c = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    CHECK(s == Approx((2 * l + 1) / (4 * kPi) * specfun::legendre_p(l, c)).epsilon(1e-12));
}

TEST_CASE("evaluate_field is linear")
{
    const BandWindow w = make_window(40, 0.25);
    FieldSample a = sample_field(w, 1), b = sample_field(w, 2), ab = a;
    for (std::size_t i = 0; i < ab.coeffs.size(); ++i)
        ab.coeffs[i] += b.coeffs[i];
    const std::vector<Vec3> pts = {unit(0.1, 0.2), unit(1.5, 3.0), unit(3.1, -1.0), {0, 0, 1}};
    const auto va = evaluate_field(a, pts), vb = evaluate_field(b, pts), vab = evaluate_field(ab, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(std::abs(vab[i] - va[i] - vb[i]) <= 1e-12);
    const auto batch = evaluate_fields({a, b}, pts);
    CHECK(batch[0] == va);
    CHECK(batch[1] == vb);
}

TEST_CASE("evaluate_field rejects points off the sphere")
{
    const BandWindow w = make_window(10, 0.2);
    CHECK_THROWS_AS(evaluate_field(sample_field(w, 1), {{0, 0, 1.001}}), DomainError);
}

TEST_CASE("pointwise variance and two-point covariance over seeds")
{
    const BandWindow w = make_window(12, 0.3);
    const double th = 0.35;
    const Vec3 x = unit(0.9, 0.4);
    const Vec3 y = {std::cos(th) * x[0] + std::sin(th) * std::cos(0.9) * std::cos(0.4),
                    std::cos(th) * x[1] + std::sin(th) * std::cos(0.9) * std::sin(0.4),
                    std::cos(th) * x[2] - std::sin(th) * std::sin(0.9)};
    const int N = 10000;
    double s2 = 0, s4 = 0, sxy = 0, sxy2 = 0;
    for (int i = 0; i < N; ++i) {
        const auto v = evaluate_field(sample_field(w, sample_seed(99, i)), {x, y});
        s2 += v[0] * v[0];
        s4 += std::pow(v[0], 4);
        sxy += v[0] * v[1];
        sxy2 += v[0] * v[0] * v[1] * v[1];
    }
    const double var = s2 / N;
    CHECK(std::abs(var - 1) <= 0.05);
    const double cov = sxy / N;
    const double se = std::sqrt((sxy2 / N - cov * cov) / N);
    CHECK(std::abs(cov - gamma_exact(w, th).gamma) <= 3 * se);
}

TEST_CASE("rotating the evaluation points leaves the statistics unchanged")
{
    const BandWindow w = make_window(10, 0.3);
    const Vec3 x = unit(0.3, 0.0), y = unit(0.8, 0.5);
    const int N = 4000;
    double c1 = 0, c2 = 0, q1 = 0, q2 = 0;
    for (int i = 0; i < N; ++i) {
        const FieldSample s = sample_field(w, sample_seed(5, i));
        const auto a = evaluate_field(s, {x, y});
        const auto b = evaluate_field(s, {rotate(x, 1.1), rotate(y, 1.1)});
        c1 += a[0] * a[1];
        c2 += b[0] * b[1];
        q1 += a[0] * a[0] * a[1] * a[1];
        q2 += b[0] * b[0] * b[1] * b[1];
    }
    c1 /= N;
    c2 /= N;
    const double se = std::sqrt((q1 / N - c1 * c1) / N + (q2 / N - c2 * c2) / N);
    CHECK(std::abs(c1 - c2) <= 3 * se);
}

TEST_CASE("nodal length of the axial l = 1 harmonic is the equator")
{
    const BandWindow w = make_band(1, 1);
    FieldSample s;
    s.window = w;
    s.coeffs.assign(3, 0.0);
    s.coeffs[s.index(1, 0)] = 1.0;
    for (int lv : {3, 4, 5}) {
        const Mesh m = build_mesh(lv);
        CHECK(std::abs(nodal_length(evaluate_field(s, m.vertices), m) - 2 * kPi) <= 0.01 * 2 * kPi);
    }
}

TEST_CASE("nodal length trivial cases")
{
    const Mesh m = build_mesh(3);
    CHECK(nodal_length(std::vector<double>(m.vertices.size(), 1.0), m) == 0.0);
    const BandWindow w = make_window(8, 0.3);
    auto v = evaluate_field(sample_field(w, 3), m.vertices);
    const double len = nodal_length(v, m);
    for (auto& x : v)
        x = -x;
    CHECK(nodal_length(v, m) == Approx(len).epsilon(1e-12));
    CHECK(len > 0);
    CHECK_THROWS_AS(nodal_length(std::vector<double>(3, 1.0), m), DomainError);
}

TEST_CASE("nodal length converges under refinement")
{
    const BandWindow w = make_window(8, 0.3);
    const FieldSample s = sample_field(w, 11);
    std::vector<double> len;
    for (int lv = 4; lv <= 7; ++lv) {
        const Mesh m = build_mesh(lv);
        len.push_back(nodal_length(evaluate_field(s, m.vertices), m));
    }
    for (std::size_t i = 2; i < len.size(); ++i)
        CHECK(std::abs(len[i] - len[i - 1]) <= 0.5 * std::abs(len[i - 1] - len[i - 2]));
}

TEST_CASE("mc_nodal_stats mean at n = 10, g = 0.2")
{
    const BandWindow w = make_window(10, 0.2);
    const NodalStats st = mc_nodal_stats(w, 500, min_mesh_level(w), 2024);
    const double target = 2 * kPi * std::sqrt(w.D);
    CHECK(target == Approx(2 * kPi * std::sqrt(46.0)));
    CHECK(std::abs(st.mean_length - target) <= 3 * st.stderr_mean + 0.01 * target);
    CHECK(st.var_length >= 0);
    CHECK(st.stderr_mean == Approx(std::sqrt(st.var_length / 500)));
    CHECK(st.stderr_var > 0);
    CHECK(st.mesh_resolution == 10242);
    CHECK(!st.discretization_note.empty());
}

TEST_CASE("mc_nodal_stats determinism")
{
    const BandWindow w = make_window(8, 0.3);
    const int lv = min_mesh_level(w);
    const NodalStats a = mc_nodal_stats(w, 40, lv, 9, 1), b = mc_nodal_stats(w, 40, lv, 9, 3);
    CHECK(a.lengths == b.lengths);
    CHECK(a.mean_length == b.mean_length);
    CHECK(a.var_length == b.var_length);
    CHECK(a.stderr_var == b.stderr_var);
    const std::string csv = lengths_csv(a);
    CHECK(csv.rfind("seed,length\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
    CHECK_THROWS_AS(mc_nodal_stats(w, 40, lv - 1, 9), ConstructionError);
}
