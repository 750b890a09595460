#include "perthull/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace perthull {

namespace {

// Nodes and weights of the 15-point Kronrod rule with embedded 7-point Gauss
// rule on [-1, 1] (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double err;
    int depth;
};

Panel gk15(const std::function<double(double)>& f, double a, double b, int depth) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    double kronrod = kWgk[7] * fv[7];
    double gauss = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kronrod += kWgk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = kronrod * h;
    p.err = std::fabs((kronrod - gauss) * h);
    // QUADPACK-style sharpening of the raw difference.
    double resabs = 0.0;
    for (int i = 0; i < 15; ++i) resabs += std::fabs(fv[i]);
    resabs *= std::fabs(h) * kWgk[7];
    if (resabs > 0.0 && p.err > 0.0)
        p.err = resabs * std::min(1.0, std::pow(200.0 * p.err / resabs, 1.5));
    p.depth = depth;
    return p;
}

}  // namespace

QuadResult integrate_with_breakpoints(const std::function<double(double)>& f,
                                      double a, double b,
                                      const std::vector<double>& breakpoints,
                                      double abs_tol, double rel_tol, int max_depth) {
    QuadResult res;
    if (!(b > a)) {
        res.converged = true;
        return res;
    }
    std::vector<double> cuts{a};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    std::vector<Panel> heap;
    double total = 0.0, err = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        Panel p = gk15(f, cuts[i], cuts[i + 1], 0);
        total += p.value;
        err += p.err;
        heap.push_back(p);
        res.evals += 15;
    }
    auto worse = [](const Panel& x, const Panel& y) { return x.err < y.err; };
    std::make_heap(heap.begin(), heap.end(), worse);

    while (err > std::max(abs_tol, rel_tol * std::fabs(total)) && !heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), worse);
        Panel p = heap.back();
        heap.pop_back();
        if (p.depth >= max_depth || p.b - p.a <= std::fabs(p.a) * 1e-16) {
            // Cannot refine further; account for the stuck panel and move on.
            total += 0.0;
            break;
        }
        const double m = 0.5 * (p.a + p.b);
        Panel l = gk15(f, p.a, m, p.depth + 1);
        Panel r = gk15(f, m, p.b, p.depth + 1);
        res.evals += 30;
        total += l.value + r.value - p.value;
        err += l.err + r.err - p.err;
        heap.push_back(l);
        std::push_heap(heap.begin(), heap.end(), worse);
        heap.push_back(r);
        std::push_heap(heap.begin(), heap.end(), worse);
    }
    res.value = total;
    res.abserr = err;
    res.converged = err <= std::max(abs_tol, rel_tol * std::fabs(total));
    return res;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, int max_depth) {
    return integrate_with_breakpoints(f, a, b, {}, abs_tol, rel_tol, max_depth);
}

}  // namespace perthull
