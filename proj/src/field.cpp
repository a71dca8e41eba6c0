#include "nodalband/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "nodalband/errors.hpp"
#include "nodalband/parallel.hpp"

namespace nodalband {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 normalize(const Vec3& v)
{
    const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / r, v[1] / r, v[2] / r};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double arc(const Vec3& a, const Vec3& b)
{
    const Vec3 c = cross(a, b);
    return std::atan2(std::sqrt(dot(c, c)), dot(a, b));
}

// Van Oosterom-Strackee solid angle of the spherical triangle abc.
double tri_area(const Vec3& a, const Vec3& b, const Vec3& c)
{
    const double num = std::abs(dot(a, cross(b, c)));
    const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    return 2.0 * std::atan2(num, den);
}

} // namespace

Mesh build_mesh(int level)
{
    if (level < 0)
        throw ConstructionError("build_mesh: negative level");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    Mesh m;
    m.level = level;
    m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                  {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : m.vertices)
        v = normalize(v);
    m.triangles = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                   {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
                   {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int lv = 0; lv < level; ++lv) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end())
                return it->second;
            const Vec3& p = m.vertices[a];
            const Vec3& q = m.vertices[b];
            m.vertices.push_back(normalize({p[0] + q[0], p[1] + q[1], p[2] + q[2]}));
            const int id = int(m.vertices.size()) - 1;
            mid.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(m.triangles.size() * 4);
        for (const auto& tr : m.triangles) {
            const int a = midpoint(tr[0], tr[1]);
            const int b = midpoint(tr[1], tr[2]);
            const int c = midpoint(tr[2], tr[0]);
            next.push_back({tr[0], a, c});
            next.push_back({tr[1], b, a});
            next.push_back({tr[2], c, b});
            next.push_back({a, b, c});
        }
        m.triangles.swap(next);
    }
    // Voronoi weights: each triangle is cut at its circumcentre and edge midpoints.
    m.weights.assign(m.vertices.size(), 0.0);
    for (const auto& tr : m.triangles) {
        const Vec3& a = m.vertices[tr[0]];
        const Vec3& b = m.vertices[tr[1]];
        const Vec3& c = m.vertices[tr[2]];
        Vec3 cc = normalize(cross({b[0] - a[0], b[1] - a[1], b[2] - a[2]}, {c[0] - a[0], c[1] - a[1], c[2] - a[2]}));
        if (dot(cc, a) < 0)
            cc = {-cc[0], -cc[1], -cc[2]};
        const Vec3 ab = normalize({a[0] + b[0], a[1] + b[1], a[2] + b[2]});
        const Vec3 bc = normalize({b[0] + c[0], b[1] + c[1], b[2] + c[2]});
        const Vec3 ca = normalize({c[0] + a[0], c[1] + a[1], c[2] + a[2]});
        m.weights[tr[0]] += tri_area(a, ab, cc) + tri_area(a, cc, ca);
        m.weights[tr[1]] += tri_area(b, bc, cc) + tri_area(b, cc, ab);
        m.weights[tr[2]] += tri_area(c, ca, cc) + tri_area(c, cc, bc);
        m.max_edge = std::max({m.max_edge, arc(a, b), arc(b, c), arc(c, a)});
    }
    return m;
}

double max_admissible_edge(const BandWindow& win, double q) { return 2.0 * kPi / (q * win.n); }

int min_mesh_level(const BandWindow& win, double q)
{
    const double limit = max_admissible_edge(win, q);
    // Longest edge at level L is the level-0 edge scaled by about 2^-L; confirm on the mesh.
    int level = std::max(0, int(std::floor(std::log2(1.1071487177940904 / limit))));
    while (build_mesh(level).max_edge > limit)
        ++level;
    return level;
}

void check_mesh(const Mesh& mesh, const BandWindow& win, double q)
{
    if (mesh.max_edge > max_admissible_edge(win, q))
        throw ConstructionError("mesh level " + std::to_string(mesh.level) + " is too coarse for n = "
                                + std::to_string(win.n) + "; minimum admissible level is "
                                + std::to_string(min_mesh_level(win, q)));
}

std::size_t FieldSample::index(int l, int m) const
{
    const long long L0 = window.L0;
    const long long off = (long long)l * l - L0 * L0;
    return std::size_t(off + l + m);
}

std::uint64_t sample_seed(std::uint64_t run_seed, std::uint64_t i)
{
    std::seed_seq seq{std::uint32_t(run_seed), std::uint32_t(run_seed >> 32), std::uint32_t(i),
                      std::uint32_t(i >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (std::uint64_t(out[0]) << 32) | out[1];
}

FieldSample sample_field(const BandWindow& win, std::uint64_t seed)
{
    FieldSample s;
    s.window = win;
    s.seed = seed;
    s.coeffs.resize(std::size_t(win.modes));
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), 0x666c64u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> nd(0.0, std::sqrt(win.Csq));
    for (auto& c : s.coeffs)
        c = nd(rng);
    return s;
}

namespace {

std::vector<double> legendre_table(int n, bool second)
{
    std::vector<double> t((n + 1) * (n + 1), 0.0);
    for (int m = 0; m <= n; ++m)
        for (int l = m + 2; l <= n; ++l)
            t[l * (n + 1) + m] = second
                                     ? std::sqrt(((l - 1.0) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1))
                                     : std::sqrt((4.0 * l * l - 1) / (double(l) * l - double(m) * m));
    return t;
}

} // namespace

std::vector<std::vector<double>> evaluate_fields(const std::vector<FieldSample>& samples,
                                                 const std::vector<Vec3>& points)
{
    const std::size_t K = samples.size();
    std::vector<std::vector<double>> out(K, std::vector<double>(points.size()));
    if (K == 0)
        return out;
    const BandWindow& w = samples[0].window;
    for (const auto& s : samples)
        if (s.window.n != w.n || s.window.L0 != w.L0)
            throw DomainError("evaluate_fields: samples must share a window");
    const int n = w.n, L0 = w.L0;
    const std::vector<double> A = legendre_table(n, false), B = legendre_table(n, true);
    // coefficients interleaved by sample so the inner loop runs over the batch
    std::vector<double> coef(std::size_t(w.modes) * K);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t i = 0; i < std::size_t(w.modes); ++i)
            coef[i * K + k] = samples[k].coeffs[i];
    std::vector<double> accc(K), accs(K), total(K);
    for (std::size_t p = 0; p < points.size(); ++p) {
        const Vec3& v = points[p];
        const double r = std::sqrt(dot(v, v));
        if (std::abs(r - 1.0) > 1e-12)
            throw DomainError("evaluate_field: point is not on the unit sphere");
        const double x = std::clamp(v[2], -1.0, 1.0);
        const double st = std::hypot(v[0], v[1]);
        const double cphi = st > 0 ? v[0] / st : 1.0, sphi = st > 0 ? v[1] / st : 0.0;
        std::fill(total.begin(), total.end(), 0.0);
        double pmm = 1.0 / std::sqrt(4 * kPi);  // P_m^m
        double cm = 1.0, sm = 0.0;                // cos(m phi), sin(m phi)
        for (int m = 0; m <= n; ++m) {
            if (m > 0) {
                pmm *= std::sqrt((2.0 * m + 1) / (2.0 * m)) * st;
                const double c2 = cm * cphi - sm * sphi;
                sm = sm * cphi + cm * sphi;
                cm = c2;
            }
            std::fill(accc.begin(), accc.end(), 0.0);
            std::fill(accs.begin(), accs.end(), 0.0);
            double p0 = 0.0, p1 = pmm;
            for (int l = m; l <= n; ++l) {
                double pl;
                if (l == m)
                    pl = pmm;
                else if (l == m + 1)
                    pl = std::sqrt(2.0 * m + 3) * x * pmm;
                else
                    pl = A[l * (n + 1) + m] * (x * p1 - B[l * (n + 1) + m] * p0);
                if (l > m) {
                    p0 = p1;
                    p1 = pl;
                }
                if (l >= L0) {
                    const std::size_t base = std::size_t((long long)l * l - (long long)L0 * L0 + l);
                    const double* cp = &coef[(base + m) * K];
                    for (std::size_t k = 0; k < K; ++k)
                        accc[k] += cp[k] * pl;
                    if (m > 0) {
                        const double* sp = &coef[(base - m) * K];
                        for (std::size_t k = 0; k < K; ++k)
                            accs[k] += sp[k] * pl;
                    }
                }
            }
            if (m == 0)
                for (std::size_t k = 0; k < K; ++k)
                    total[k] += accc[k];
            else
                for (std::size_t k = 0; k < K; ++k)
                    total[k] += std::numbers::sqrt2 * (accc[k] * cm + accs[k] * sm);
        }
        for (std::size_t k = 0; k < K; ++k)
            out[k][p] = total[k];
    }
    return out;
}

std::vector<double> evaluate_field(const FieldSample& sample, const std::vector<Vec3>& points)
{
    return std::move(evaluate_fields({sample}, points)[0]);
}

double nodal_length(const std::vector<double>& values, const Mesh& mesh)
{
    if (values.size() != mesh.vertices.size())
        throw DomainError("nodal_length: one value per mesh vertex expected");
    auto val = [&](int i) { return values[i] == 0.0 ? 1e-14 : values[i]; };
    auto crossing = [&](int i, int j) {
        const double fi = val(i), fj = val(j);
        const double t = fi / (fi - fj);
        const Vec3& a = mesh.vertices[i];
        const Vec3& b = mesh.vertices[j];
        return normalize({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])});
    };
    std::vector<double> seg(mesh.triangles.size(), 0.0);
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        const auto& tr = mesh.triangles[k];
        Vec3 pts[2];
        int np = 0;
        for (int e = 0; e < 3; ++e) {
            const int i = tr[e], j = tr[(e + 1) % 3];
            if ((val(i) > 0) != (val(j) > 0))
                pts[np++] = crossing(i, j);
        }
        if (np == 2)
            seg[k] = arc(pts[0], pts[1]);
    }
    return pairwise_sum(seg);
}

NodalStats mc_nodal_stats(const BandWindow& win, long n_samples, int level, std::uint64_t seed, int threads, double q)
{
    if (n_samples < 2)
        throw DomainError("mc_nodal_stats: need at least two samples");
    const Mesh mesh = build_mesh(level);
    check_mesh(mesh, win, q);
    NodalStats st;
    st.n_samples = n_samples;
    st.mesh_level = level;
    st.mesh_resolution = long(mesh.vertices.size());
    st.seed = seed;
    st.lengths.resize(n_samples);
    // samples go through the Legendre recurrence in batches
    const std::size_t batch = 32;
    const std::size_t nb = (std::size_t(n_samples) + batch - 1) / batch;
    parallel_for(nb, threads, [&](std::size_t b) {
        std::vector<FieldSample> group;
        for (std::size_t i = b * batch; i < std::min<std::size_t>(std::size_t(n_samples), (b + 1) * batch); ++i)
            group.push_back(sample_field(win, sample_seed(seed, i)));
        const auto values = evaluate_fields(group, mesh.vertices);
        for (std::size_t k = 0; k < group.size(); ++k)
            st.lengths[b * batch + k] = nodal_length(values[k], mesh);
    });
    const double N = double(n_samples);
    st.mean_length = pairwise_sum(st.lengths) / N;
    std::vector<double> dev(n_samples);
    for (long i = 0; i < n_samples; ++i)
        dev[i] = (st.lengths[i] - st.mean_length) * (st.lengths[i] - st.mean_length);
    st.var_length = pairwise_sum(dev) / (N - 1);
    st.stderr_mean = std::sqrt(st.var_length / N);

    // Bootstrap spread of the variance estimator.
    const int reps = 200;
    std::vector<double> boot(reps);
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), 0x626f6fu};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<long> pick(0, n_samples - 1);
    std::vector<double> draw(n_samples);
    for (int r = 0; r < reps; ++r) {
        for (long i = 0; i < n_samples; ++i)
            draw[i] = st.lengths[pick(rng)];
        const double mu = pairwise_sum(draw) / N;
        for (auto& d : draw)
            d = (d - mu) * (d - mu);
        boot[r] = pairwise_sum(draw) / (N - 1);
    }
    const double bm = pairwise_sum(boot) / reps;
    double bv = 0.0;
    for (double b : boot)
        bv += (b - bm) * (b - bm);
    st.stderr_var = std::sqrt(bv / (reps - 1));

    std::ostringstream note;
    note << "linear interpolation on icosahedral level " << level << " (" << mesh.vertices.size()
         << " vertices, longest edge " << mesh.max_edge << " rad, limit " << max_admissible_edge(win, q) << ")";
    st.discretization_note = note.str();
    return st;
}

std::string lengths_csv(const NodalStats& stats)
{
    std::ostringstream os;
    os.precision(17);
    os << "seed,length\n";
    for (std::size_t i = 0; i < stats.lengths.size(); ++i)
        os << sample_seed(stats.seed, i) << ',' << stats.lengths[i] << '\n';
    return os.str();
}

} // namespace nodalband
