#include "nodalband/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "nodalband/parallel.hpp"

namespace nodalband::quad {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEst {
    double a, b;
    Estimate est;
    double absval;
};

PanelEst eval_panel(const std::function<double(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * wgk[7];
    double rg = fc * wg[3];
    double ra = std::abs(rk);
    for (int j = 0; j < 7; ++j) {
        const double dx = hl * xgk[j];
        const double f1 = f(c - dx), f2 = f(c + dx);
        rk += wgk[j] * (f1 + f2);
        ra += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1)
            rg += wg[j / 2] * (f1 + f2);
    }
    return {a, b, {rk * hl, std::abs((rk - rg) * hl)}, ra * std::abs(hl)};
}

} // namespace

Estimate gk15(const std::function<double(double)>& f, double a, double b)
{
    return eval_panel(f, a, b).est;
}

Result integrate(const std::function<double(double)>& f, const std::vector<double>& edges,
                 double rel_tol, double abs_tol, int threads, int max_rounds)
{
    Result res;
    if (edges.size() < 2)
        return res;
    const double total_width = edges.back() - edges.front();
    std::vector<PanelEst> done;
    std::vector<std::pair<double, double>> todo;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        if (edges[i + 1] > edges[i])
            todo.emplace_back(edges[i], edges[i + 1]);

    double scale = 0.0;
    for (int round = 0; !todo.empty(); ++round) {
        std::vector<PanelEst> cur(todo.size());
        parallel_for(todo.size(), threads, [&](std::size_t i) { cur[i] = eval_panel(f, todo[i].first, todo[i].second); });
        res.evaluations += 15 * long(cur.size());
        if (round == 0) {
            std::vector<double> av(cur.size());
            for (std::size_t i = 0; i < cur.size(); ++i)
                av[i] = cur[i].absval;
            scale = pairwise_sum(av);
        }
        todo.clear();
        for (auto& p : cur) {
            const double share = (p.b - p.a) / total_width;
            const double target = std::max(rel_tol * scale, abs_tol) * share;
            if (p.est.error <= target || round >= max_rounds) {
                done.push_back(p);
            } else {
                const double mid = 0.5 * (p.a + p.b);
                todo.emplace_back(p.a, mid);
                todo.emplace_back(mid, p.b);
            }
        }
    }
    std::sort(done.begin(), done.end(), [](const PanelEst& x, const PanelEst& y) { return x.a < y.a; });
    std::vector<double> vals(done.size()), errs(done.size()), abss(done.size());
    for (std::size_t i = 0; i < done.size(); ++i) {
        vals[i] = done[i].est.value;
        errs[i] = done[i].est.error;
        abss[i] = done[i].absval;
    }
    res.value = pairwise_sum(vals);
    res.error = pairwise_sum(errs);
    res.abs_value = pairwise_sum(abss);
    res.panels = int(done.size());
    res.converged = res.error <= std::max(rel_tol * scale, abs_tol) * 1.0000001 || res.error == 0.0;
    return res;
}

std::vector<double> geometric_edges(double lo, double hi, int count)
{
    std::vector<double> e(count + 1);
    const double r = std::log(hi / lo);
    for (int k = 0; k <= count; ++k)
        e[k] = lo * std::exp(r * k / count);
    e[0] = lo;
    e[count] = hi;
    return e;
}

std::vector<double> uniform_edges(double lo, double hi, double width)
{
    const int count = std::max(1, int(std::ceil((hi - lo) / width)));
    std::vector<double> e(count + 1);
    for (int k = 0; k <= count; ++k)
        e[k] = lo + (hi - lo) * k / count;
    e[count] = hi;
    return e;
}

} // namespace nodalband::quad
