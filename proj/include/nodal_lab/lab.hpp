#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "nodal_lab/config.hpp"
#include "nodal_lab/fem.hpp"
#include "nodal_lab/nodal.hpp"
#include "nodal_lab/report.hpp"
#include "nodal_lab/spectrum.hpp"
#include "nodal_lab/surgery.hpp"

namespace nodal_lab {

// ---------------------------------------------------------------- configuration

struct SweepConfig {
    std::string m1 = "ellipsoid:3:1,1.1,1.25";
    std::string m2 = "torus:0.3";
    double eta = 0.1;        // radius of the ball removed from M2
    double eps0 = 0.0;       // collar radius (0: chosen from the nodal clearance of x1)
    double eps_max = 0.0;    // largest scheduled epsilon (0: 0.8 eps0)
    int steps = 5;           // schedule eps_max * 2^-i, i = 0..steps
    int m = 4;
    std::vector<int> m_list{2, 3, 4, 6, 8};
    double tol = 1e-9;
    unsigned seed = 42;
    int loop_nodes = 32;
    double cap = 0.3;        // upper bound on eps0 (chart neighbourhood)
    int threads = 0;         // 0: hardware concurrency
    std::string out = "./results";

    std::vector<double> schedule(double top) const {
        std::vector<double> s;
        for (int i = 0; i <= steps; ++i) s.push_back(top * std::pow(2.0, -i));
        return s;
    }

    static SweepConfig from(const Config& c) {
        SweepConfig s;
        s.m1 = c.get("geometry.m1", s.m1);
        s.m2 = c.get("geometry.m2", s.m2);
        s.eta = c.get("geometry.eta", s.eta);
        s.eps0 = c.get("sweep.eps0", s.eps0);
        s.eps_max = c.get("sweep.eps_max", s.eps_max);
        s.steps = c.get("sweep.steps", s.steps);
        s.m = c.get("solve.m", s.m);
        std::vector<double> ml(s.m_list.begin(), s.m_list.end());
        ml = c.get_list("threshold.m_list", ml);
        s.m_list.clear();
        for (double x : ml) {
            if (x != std::floor(x) || x < 1) fail(ErrorKind::invalid_input, "config: threshold.m_list needs positive integers");
            s.m_list.push_back(static_cast<int>(x));
        }
        s.tol = c.get("solve.tol", s.tol);
        s.seed = static_cast<unsigned>(c.get("seed", static_cast<int>(s.seed)));
        s.loop_nodes = c.get("surgery.loop_nodes", s.loop_nodes);
        s.cap = c.get("sweep.cap", s.cap);
        s.threads = c.get("threads", s.threads);
        s.out = c.get("out", s.out);
        s.validate();
        return s;
    }

    void validate() const {
        require(eta > 0, "config: geometry.eta must be positive");
        require(eps0 >= 0 && eps_max >= 0, "config: sweep radii must be non-negative");
        require(steps >= 0, "config: sweep.steps must be non-negative");
        require(m >= 1, "config: solve.m must be at least 1");
        require(tol > 0 && tol < 1e-2, "config: solve.tol must lie in (0, 1e-2)");
        require(loop_nodes >= 8 && loop_nodes % 2 == 0, "config: surgery.loop_nodes must be even and >= 8");
        require(cap > 0, "config: sweep.cap must be positive");
        require(!m_list.empty(), "config: threshold.m_list must not be empty");
        if (eps0 > 0 && eps_max > 0) require(eps_max < eps0, "config: sweep.eps_max must stay below sweep.eps0");
    }
};

// ---------------------------------------------------------------- helpers

namespace detail {

/// Runs f(i) for i in [0, n) on a small pool; results are placed by index so the outcome does not
/// depend on scheduling. The first exception is rethrown after all workers finish.
inline void parallel_for(int n, int threads, const std::function<void(int)>& f) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(1, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::mutex lock;
    int next = 0;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i;
                {
                    std::lock_guard<std::mutex> g(lock);
                    if (next >= n || error) return;
                    i = next++;
                }
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(lock);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// For each vertex of `a`, the vertex of `b` at bitwise the same position, or -1.
inline std::vector<int> match_vertices(const IntrinsicMesh& a, const IntrinsicMesh& b) {
    std::map<Point, int> index;
    for (int v = 0; v < b.vertex_count(); ++v) index.emplace(b.points[v], v);
    std::vector<int> out(a.vertex_count(), -1);
    for (int v = 0; v < a.vertex_count(); ++v) {
        auto it = index.find(a.points[v]);
        if (it != index.end()) out[v] = it->second;
    }
    return out;
}

inline std::vector<double> vertex_areas(const IntrinsicMesh& m) {
    std::vector<double> w(m.vertex_count(), 0.0);
    for (int t = 0; t < m.triangle_count(); ++t)
        for (int v : m.triangles[t]) w[v] += m.triangle_area(t) / 3.0;
    return w;
}

/// Orthogonal Q minimising the weighted misfit |G Q - R| over matched rows.
inline Matrix procrustes(const Matrix& g, const Matrix& r, const std::vector<std::pair<int, int>>& rows,
                         const std::vector<double>& weight) {
    Matrix c = Matrix::Zero(g.cols(), r.cols());
    for (const auto& [i, j] : rows) c += weight[j] * g.row(i).transpose() * r.row(j);
    Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace detail

/// Triangles with the given tag as a mesh of their own, keeping the parent's edge lengths.
inline IntrinsicMesh region_submesh(const IntrinsicMesh& m, Region r) {
    std::vector<int> map(m.vertex_count(), -1), back;
    std::vector<Point> pts;
    std::vector<Tri> tris;
    for (int t = 0; t < m.triangle_count(); ++t) {
        if (m.regions[t] != r) continue;
        Tri tr = m.triangles[t];
        for (int& v : tr) {
            if (map[v] < 0) {
                map[v] = static_cast<int>(pts.size());
                pts.push_back(m.points[v]);
                back.push_back(v);
            }
            v = map[v];
        }
        tris.push_back(tr);
    }
    require(!tris.empty(), "region_submesh: no triangles with the requested tag");
    return IntrinsicMesh::build(std::move(pts), std::move(tris), {}, Chart{},
                                [&](int a, int b) { return m.length(back[a], back[b]); });
}

/// Least-squares slope and RMS residual of y against x.
struct LineFit {
    double slope = kNaN, intercept = kNaN, residual = kNaN;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
    require(sxx > 0, "fit_line: x values must not all coincide");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(y[i] - f.intercept - f.slope * x[i], 2);
    f.residual = std::sqrt(ss / n);
    return f;
}

// ---------------------------------------------------------------- gluing setup

/// Modes solved beyond the requested ones so the last alignment group is complete.
inline constexpr int kExtraModes = 5;

/// Everything an epsilon sweep on M1 # M2 keeps fixed: the surfaces, the gluing point, the collar,
/// the patch geometry and the reference mesh (M1 with the same rings, filled below the smallest eps).
struct GluingSetup {
    IntrinsicMesh m1, m2;
    int modes = 0;            // eigenpairs used to place x1
    int x1 = 0;
    double clearance = 0.0;
    double eps0 = 0.0;
    double eps_max = 0.0;
    double cut1 = 0.0, anchor1 = 0.0;
    std::vector<double> schedule;
    IntrinsicMesh reference;
    Spectrum ref_spectrum;
    int ref_m = 0;
};

inline GluingSetup prepare_gluing(const SweepConfig& cfg, int modes, int ref_m) {
    GluingSetup s;
    s.m1 = parse_geometry(cfg.m1);
    s.m2 = parse_geometry(cfg.m2);
    require(s.m1.closed() && s.m2.closed(), "sweep: both surfaces must be closed");
    s.modes = modes;
    const auto base = solve_lowest(assemble(s.m1, BoundaryCondition::closed), modes, cfg.tol, cfg.seed);
    if (!base.converged) fail(ErrorKind::numerical, "sweep: M1 spectrum did not converge");
    s.x1 = best_clearance_vertex(s.m1, base, modes);
    const auto collar = choose_epsilon0(s.m1, base, modes, s.x1, cfg.cap);
    s.clearance = collar.clearance;
    s.eps0 = cfg.eps0 > 0 ? cfg.eps0 : collar.epsilon0;
    s.eps_max = cfg.eps_max > 0 ? cfg.eps_max : 0.8 * s.eps0;
    if (!(s.eps_max < s.eps0)) fail(ErrorKind::invalid_input, "sweep: largest epsilon must stay below eps0");
    s.schedule = cfg.schedule(s.eps_max);

    const Point& x = s.m1.points[s.x1];
    const LocalFrame frame = LocalFrame::at(s.m1.chart, x);
    const double r_max = frame.local_radius(s.eps_max);
    s.cut1 = std::max(1.6 * r_max, r_max + 2.0 * max_edge_length(s.m1));
    s.anchor1 = r_max;
    const double r_min = frame.local_radius(s.schedule.back());
    s.reference = polar_patch(s.m1, x, {s.cut1, 0.0, r_min, cfg.loop_nodes, s.anchor1}).mesh;
    s.ref_m = ref_m;
    s.ref_spectrum = solve_lowest(assemble(s.reference, BoundaryCondition::closed), ref_m, cfg.tol, cfg.seed);
    if (!s.ref_spectrum.converged) fail(ErrorKind::numerical, "sweep: reference spectrum did not converge");
    return s;
}

/// A point of M2 well inside one chart sheet.
inline Point default_x2(const IntrinsicMesh& m2) {
    switch (m2.chart.kind) {
        case Chart::Kind::periodic: return {0.5 * m2.chart.period_x, 0.5 * m2.chart.period_y, 0.0};
        case Chart::Kind::doubled: return {0.5, 1.5, 0.0};
        case Chart::Kind::star: return {m2.chart.axes[0], 0.0, 0.0};
        default: return m2.points[0];
    }
}

inline GluedMesh glue_at(const GluingSetup& s, const SweepConfig& cfg, double eps) {
    GluedSpec g;
    g.epsilon = eps;
    g.epsilon0 = s.eps0;
    g.x1 = s.m1.points[s.x1];
    g.x2 = default_x2(s.m2);
    g.m2_radius = cfg.eta;
    g.cut1 = s.cut1;
    g.anchor1 = s.anchor1;
    g.loop_nodes = cfg.loop_nodes;
    return connected_sum(s.m1, s.m2, g);
}

// ---------------------------------------------------------------- convergence sweep

struct GluedSolve {
    GluedMesh glued;
    Spectrum spectrum;
    std::vector<SweepRecord> records;
    double d2_lambda = kNaN;   // lowest Dirichlet eigenvalue of the M2 part alone
    std::string failure;
};

/// Relative spacing below which neighbouring reference eigenvalues are compared as one block.
inline constexpr double kAlignGap = 0.1;

/// Runs of consecutive nonzero eigenvalues 1..top whose relative spacing is below kAlignGap.
inline std::vector<std::vector<int>> alignment_groups(const Spectrum& ref, int top) {
    std::vector<std::vector<int>> out;
    for (int k = 1; k <= top; ++k) {
        if (out.empty() || (ref.eigenvalues[k] - ref.eigenvalues[k - 1]) >= kAlignGap * ref.eigenvalues[k])
            out.emplace_back();
        out.back().push_back(k);
    }
    return out;
}

/// One sweep point: glue, solve, align to the reference on bulk vertices, classify nodal sets.
inline GluedSolve solve_glued(const GluingSetup& s, const SweepConfig& cfg, double eps, int m, bool details = true) {
    GluedSolve out;
    out.glued = glue_at(s, cfg, eps);
    const IntrinsicMesh& g = out.glued.mesh;
    out.spectrum = solve_lowest(assemble(g, BoundaryCondition::closed), std::max(m, s.ref_m), cfg.tol, cfg.seed);
    const Spectrum& sp = out.spectrum;
    if (!sp.converged) out.failure = "solver did not converge at eps=" + detail::fmt(eps);

    // bulk vertices shared with the reference
    const auto match = detail::match_vertices(g, s.reference);
    std::vector<char> bulk(g.vertex_count(), 0);
    for (int t = 0; t < g.triangle_count(); ++t)
        if (g.regions[t] == Region::m1_bulk)
            for (int v : g.triangles[t]) bulk[v] = 1;
    std::vector<std::pair<int, int>> rows;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (bulk[v] && match[v] >= 0) rows.emplace_back(v, match[v]);
    const auto weight = detail::vertex_areas(s.reference);
    const int mm = std::min(m, s.ref_m);
    const int top = std::min(sp.size(), s.ref_spectrum.size()) - 1;
    // `aligned` rotates every block onto the reference and feeds the error measures; `classified`
    // only rotates blocks whose eigenvalues still match and feeds the containment verdict
    Matrix aligned = sp.eigenvectors, classified = sp.eigenvectors;
    for (const auto& group : alignment_groups(s.ref_spectrum, top)) {
        if (group.front() > mm) break;
        const int lo = group.front(), d = static_cast<int>(group.size());
        if (lo + d - 1 > top) break;
        // a localized M2 mode shifts the indices; then the block no longer corresponds and stays raw
        bool matched = true;
        for (int k : group)
            matched = matched && std::abs(sp.eigenvalues[k] - s.ref_spectrum.eigenvalues[k]) <=
                                     kAlignGap * s.ref_spectrum.eigenvalues[k];
        const Matrix gb = sp.eigenvectors.middleCols(lo, d);
        aligned.middleCols(lo, d) = gb * detail::procrustes(gb, s.ref_spectrum.eigenvectors.middleCols(lo, d), rows, weight);
        if (matched) classified.middleCols(lo, d) = aligned.middleCols(lo, d);
    }
    const Matrix& rb = s.ref_spectrum.eigenvectors;
    for (int k = 1; k <= mm; ++k) {  // sign convention for blocks left raw
        double ip = 0.0;
        for (const auto& [i, j] : rows) ip += weight[j] * classified(i, k) * rb(j, k);
        if (ip < 0 && classified.col(k).isApprox(sp.eigenvectors.col(k))) classified.col(k) *= -1.0;
    }

    for (int k = 1; k <= mm; ++k) {
        SweepRecord r;
        r.eps = eps;
        r.k = k;
        r.lambda = sp.eigenvalues[k];
        r.lambda_ref = s.ref_spectrum.eigenvalues[k];
        r.abs_err = std::abs(r.lambda - r.lambda_ref);
        r.converged = sp.converged;
        double sup = 0.0;
        for (const auto& [i, j] : rows) sup = std::max(sup, std::abs(aligned(i, k) - rb(j, k)));
        r.sup_err = sup;
        if (details) {
            // eigenfunction properties on the raw vector, comparisons on the aligned one
            const Vector f = sp.vector(k);
            const auto raw_set = extract_level_set(g, f);
            r.domains = count_domains(g, f).count;
            if (!raw_set.empty()) r.c_hat = wavelength_density(g, raw_set, r.lambda);
            r.verdict = std::string(to_string(classify_containment(g, extract_level_set(g, classified.col(k))).kind));
            const auto set = extract_level_set(g, aligned.col(k));
            const auto ref_set = extract_level_set(s.reference, s.ref_spectrum.vector(k));
            if (!set.empty() && !ref_set.empty()) r.hausdorff = hausdorff(set, ref_set, 0.25 * max_edge_length(s.m1));
        }
        out.records.push_back(r);
    }
    if (details) {
        const auto part = region_submesh(g, Region::m2);
        const auto d2 = solve_lowest(assemble(part, BoundaryCondition::dirichlet), 0, cfg.tol, cfg.seed);
        out.d2_lambda = d2.eigenvalues[0];
    }
    return out;
}

/// True when every mode 1..m has its nodal set inside the bulk of M1.
inline bool all_contained(const GluedSolve& r, int m) {
    for (const auto& x : r.records)
        if (x.k <= m && x.verdict != to_string(Containment::contained)) return false;
    return true;
}

inline void describe_setup(ExperimentReport& rep, const GluingSetup& s, const SweepConfig& cfg, const GluedMesh& any) {
    rep.scalar("x1_vertex", s.x1);
    rep.scalar("clearance", s.clearance);
    rep.scalar("eps0", s.eps0);
    rep.scalar("eps_max", s.eps_max);
    rep.scalar("eta", cfg.eta);
    rep.scalar("D", any.spec.D);
    rep.scalar("D_tilde", any.spec.D_tilde);
    rep.scalar("gap_scale", s.ref_spectrum.eigenvalues[1]);
    rep.scalar("reference_vertices", s.reference.vertex_count());
}

inline ExperimentReport run_convergence_sweep(const SweepConfig& cfg) {
    cfg.validate();
    ExperimentReport rep;
    rep.name = "sweep";
    if (cfg.steps < 3) rep.flags.push_back("fewer than 3 halvings: too short for trend checks");
    const auto setup = prepare_gluing(cfg, cfg.m, cfg.m + kExtraModes);
    const int n = static_cast<int>(setup.schedule.size());
    std::vector<GluedSolve> results(n);
    std::vector<std::string> errors(n);
    detail::parallel_for(n, cfg.threads, [&](int i) {
        try {
            results[i] = solve_glued(setup, cfg, setup.schedule[i], cfg.m);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numerical) throw;
            errors[i] = e.what();
        }
    });
    for (int i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            rep.flags.push_back(errors[i]);
            for (int k = 1; k <= cfg.m; ++k) {
                SweepRecord r;
                r.eps = setup.schedule[i], r.k = k, r.converged = false;
                rep.records.push_back(r);
            }
            continue;
        }
        if (!results[i].failure.empty()) rep.flags.push_back(results[i].failure);
        for (const auto& r : results[i].records) rep.records.push_back(r);
        rep.series.push_back({"d2_lambda1", setup.schedule[i], results[i].d2_lambda});
    }
    rep.sort_records();
    int ok = 0;
    while (ok < n && !errors[ok].empty()) ++ok;
    if (ok < n) describe_setup(rep, setup, cfg, results[ok].glued);

    // Dirichlet problem on the attached piece: exact eps^-2 scaling
    std::vector<double> lx, ly;
    for (const auto& p : rep.series)
        if (p.series == "d2_lambda1" && p.y > 0) lx.push_back(std::log(p.x)), ly.push_back(std::log(p.y));
    if (lx.size() >= 2) {
        const auto f = fit_line(lx, ly);
        rep.scalar("d2_slope", f.slope);
        rep.scalar("d2_slope_residual", f.residual);
    }
    return rep;
}

}  // namespace nodal_lab

namespace nodal_lab {

// ---------------------------------------------------------------- threshold

struct ThresholdResult {
    int m = 0;
    double eps_star = kNaN;
    double lo = kNaN, hi = kNaN;  // final bracket: contained at lo, not at hi
    bool monotone = true;
    std::vector<std::pair<double, bool>> evaluations;
};

/// Bisection in log eps between a contained and a non-contained configuration, until the bracket is
/// narrower than 1/8 of a schedule step (a factor 2^(1/8)).
inline ThresholdResult bisect_threshold(const GluingSetup& s, const SweepConfig& cfg, int m) {
    ThresholdResult t;
    t.m = m;
    auto contained = [&](double eps) {
        auto r = solve_glued(s, cfg, eps, m);
        if (!r.spectrum.converged) fail(ErrorKind::numerical, "threshold: solver did not converge");
        const bool c = all_contained(r, m);
        t.evaluations.emplace_back(eps, c);
        return c;
    };
    double lo = s.schedule.back(), hi = s.schedule.front();
    bool ok = contained(lo) && !contained(hi);
    if (!ok) {  // widen once
        lo /= 4.0;
        hi = std::min(2.0 * hi, 0.95 * s.eps0);
        ok = contained(lo) && !contained(hi);
    }
    if (!ok) fail(ErrorKind::numerical, "threshold: containment does not change across the bracket for m=" + std::to_string(m));
    while (std::log2(hi / lo) > 0.125) {
        const double mid = std::sqrt(lo * hi);
        (contained(mid) ? lo : hi) = mid;
    }
    t.lo = lo, t.hi = hi;
    t.eps_star = std::sqrt(lo * hi);
    auto ev = t.evaluations;
    std::sort(ev.begin(), ev.end());
    bool seen_open = false;
    for (const auto& [eps, c] : ev) {
        if (!c) seen_open = true;
        else if (seen_open) t.monotone = false;
    }
    return t;
}

/// Threshold eps*(m) for every m of the configured list, the log-log slope against m and the
/// comparison of eps*(m) sqrt(m) with the constant built from measured C, D, D_tilde.
inline ExperimentReport estimate_threshold(const SweepConfig& cfg) {
    cfg.validate();
    ExperimentReport rep;
    rep.name = "threshold";
    const int top = *std::max_element(cfg.m_list.begin(), cfg.m_list.end());
    const auto setup = prepare_gluing(cfg, top, top + kExtraModes);
    const int n = static_cast<int>(cfg.m_list.size());
    std::vector<ThresholdResult> res(n);
    std::vector<std::string> errors(n);
    detail::parallel_for(n, cfg.threads, [&](int i) {
        try {
            res[i] = bisect_threshold(setup, cfg, cfg.m_list[i]);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numerical) throw;
            errors[i] = e.what();
        }
    });
    const auto any = glue_at(setup, cfg, setup.schedule.back());
    describe_setup(rep, setup, cfg, any);

    // C_hat over the reference modes used by the thresholds
    double c_hat = 0.0;
    for (int k = 1; k <= top; ++k) {
        const auto set = extract_level_set(setup.reference, setup.ref_spectrum.vector(k));
        if (!set.empty()) c_hat = std::max(c_hat, wavelength_density(setup.reference, set, setup.ref_spectrum.eigenvalues[k]));
    }
    rep.scalar("C_hat", c_hat);

    std::vector<double> lx, ly, prev;
    double c_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const int m = cfg.m_list[i];
        if (!errors[i].empty()) {
            rep.flags.push_back(errors[i]);
            continue;
        }
        const auto& t = res[i];
        if (!t.monotone) rep.flags.push_back("containment not monotone in eps for m=" + std::to_string(m));
        for (const auto& [eps, c] : t.evaluations) rep.series.push_back({"contained_m" + std::to_string(m), eps, c ? 1.0 : 0.0});
        rep.series.push_back({"eps_star", static_cast<double>(m), t.eps_star});
        rep.scalar("eps_star_m" + std::to_string(m), t.eps_star);
        lx.push_back(std::log(m));
        ly.push_back(std::log(t.eps_star));
        c_sum += t.eps_star * std::sqrt(static_cast<double>(m));
    }
    // eps*(m) must not increase with m
    for (std::size_t i = 0; i < ly.size(); ++i)
        for (std::size_t j = 0; j < ly.size(); ++j)
            if (lx[i] < lx[j] && ly[j] > ly[i] + std::log(std::pow(2.0, 0.125)))
                rep.flags.push_back("eps* increases with m");
    if (lx.size() >= 2) {
        const auto f = fit_line(lx, ly);
        rep.scalar("slope", f.slope);
        rep.scalar("slope_residual", f.residual);
    }
    // fits that drop the smallest m, to see where the power law settles
    for (std::size_t i = 1; i + 3 <= lx.size(); ++i) {
        const auto f = fit_line({lx.begin() + i, lx.end()}, {ly.begin() + i, ly.end()});
        rep.scalar("slope_from_m" + std::to_string(static_cast<int>(std::lround(std::exp(lx[i])))), f.slope);
    }
    if (!lx.empty()) {
        const double c_emp = c_sum / static_cast<double>(lx.size());
        rep.scalar("c_empirical", c_emp);
        // c = C / ((D - D_tilde) pi) * sqrt(|B_2| |M|), with two candidate volumes
        const double dd = any.spec.D - any.spec.D_tilde;
        const double m1_area = setup.m1.total_area();
        const double m2_unit_area = any.m2_area / (cfg.eta * cfg.eta);
        const double with_m2 = m1_area + setup.eps0 * setup.eps0 * m2_unit_area;
        const double pi = std::numbers::pi;
        rep.scalar("c_formula_with_m2", c_hat / (dd * pi) * std::sqrt(pi * with_m2));
        rep.scalar("c_formula_m1_only", c_hat / (dd * pi) * std::sqrt(pi * m1_area));
        rep.scalar("c_ratio_with_m2", rep.get("c_formula_with_m2") / c_emp);
        rep.scalar("c_ratio_m1_only", rep.get("c_formula_m1_only") / c_emp);
        rep.scalar("volume_with_m2", with_m2);
        rep.scalar("volume_m1_only", m1_area);
    }
    return rep;
}

}  // namespace nodal_lab

namespace nodal_lab {

// ---------------------------------------------------------------- Payne experiments

/// Rectangle [0,W] x [0,H] with either a small disk attached at a boundary point or two holes.
struct PayneConfig {
    double width = 2.0, height = 1.0;
    double h = 1.0 / 16;
    double eps_max = 0.2;
    int steps = 5;
    int m = 4;
    double tol = 1e-9;
    unsigned seed = 42;
    int loop_nodes = 32;
    int threads = 0;
    Point attach_at{0.5, 0.0, 0.0};
    std::vector<Point> holes{{0.5, 0.5, 0.0}, {1.5, 0.5, 0.0}};

    std::vector<double> schedule() const {
        std::vector<double> s;
        for (int i = 0; i <= steps; ++i) s.push_back(eps_max * std::pow(2.0, -i));
        return s;
    }
    double cut() const { return std::max(1.6 * eps_max, eps_max + 2.0 * h); }

    static PayneConfig from(const Config& c) {
        PayneConfig p;
        p.width = c.get("payne.width", p.width);
        p.height = c.get("payne.height", p.height);
        p.h = c.get("payne.h", p.h);
        p.eps_max = c.get("payne.eps_max", p.eps_max);
        p.steps = c.get("sweep.steps", p.steps);
        p.m = c.get("solve.m", p.m);
        p.tol = c.get("solve.tol", p.tol);
        p.seed = static_cast<unsigned>(c.get("seed", static_cast<int>(p.seed)));
        p.loop_nodes = c.get("surgery.loop_nodes", p.loop_nodes);
        p.threads = c.get("threads", p.threads);
        p.validate();
        return p;
    }

    void validate() const {
        require(width > 0 && height > 0 && h > 0 && h < std::min(width, height), "config: bad payne rectangle or mesh size");
        require(eps_max > 0 && steps >= 0 && m >= 2, "config: payne needs eps_max > 0 and solve.m >= 2");
        require(tol > 0 && tol < 1e-2, "config: solve.tol must lie in (0, 1e-2)");
        require(loop_nodes >= 8 && loop_nodes % 2 == 0, "config: surgery.loop_nodes must be even and >= 8");
    }
};

namespace detail {

/// Reference quantities shared by every epsilon of a Dirichlet sweep.
struct DirichletReference {
    IntrinsicMesh mesh;
    Spectrum spectrum;
    NodalSet second;  // nodal set of the second eigenfunction
    std::vector<double> weight;
};

inline DirichletReference dirichlet_reference(IntrinsicMesh mesh, const PayneConfig& cfg, int modes) {
    DirichletReference r;
    r.mesh = std::move(mesh);
    r.spectrum = solve_lowest(assemble(r.mesh, BoundaryCondition::dirichlet), modes, cfg.tol, cfg.seed);
    if (!r.spectrum.converged) fail(ErrorKind::numerical, "payne: reference spectrum did not converge");
    r.second = extract_level_set(r.mesh, lift_dirichlet_boundary(r.mesh, r.spectrum.vector(1)));
    if (!payne_check(r.mesh, r.second, cfg.h).touches)
        fail(ErrorKind::invalid_input, "payne: the unperturbed domain does not have the Payne property");
    r.weight = vertex_areas(r.mesh);
    return r;
}

/// Records k = 1..m (1-based Dirichlet numbering) of one perturbed domain against the reference.
inline std::vector<SweepRecord> dirichlet_records(const IntrinsicMesh& g, const Spectrum& sp, const DirichletReference& ref,
                                                  double eps, int m, double h, const std::vector<Region>& skip) {
    const auto match = match_vertices(g, ref.mesh);
    std::vector<char> use(g.vertex_count(), 0);
    for (int t = 0; t < g.triangle_count(); ++t)
        if (std::find(skip.begin(), skip.end(), g.regions[t]) == skip.end())
            for (int v : g.triangles[t]) use[v] = 1;
    for (int t = 0; t < g.triangle_count(); ++t)
        if (std::find(skip.begin(), skip.end(), g.regions[t]) != skip.end())
            for (int v : g.triangles[t]) use[v] = 0;
    std::vector<std::pair<int, int>> rows;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (use[v] && match[v] >= 0) rows.emplace_back(v, match[v]);

    // Dirichlet spectra start at index 0; blocks are formed over 0..top
    const int top = std::min(sp.size(), ref.spectrum.size()) - 1;
    Matrix aligned = sp.eigenvectors;
    int lo = 0;
    while (lo <= top) {
        int hi = lo;
        while (hi + 1 <= top && ref.spectrum.eigenvalues[hi + 1] - ref.spectrum.eigenvalues[hi] <
                                    kAlignGap * ref.spectrum.eigenvalues[hi + 1])
            ++hi;
        const int d = hi - lo + 1;
        const Matrix gb = sp.eigenvectors.middleCols(lo, d);
        aligned.middleCols(lo, d) = gb * procrustes(gb, ref.spectrum.eigenvectors.middleCols(lo, d), rows, ref.weight);
        lo = hi + 1;
    }

    std::vector<SweepRecord> out;
    for (int k = 1; k <= std::min(m, top + 1); ++k) {
        const int i = k - 1;
        SweepRecord r;
        r.eps = eps;
        r.k = k;
        r.lambda = sp.eigenvalues[i];
        r.lambda_ref = ref.spectrum.eigenvalues[i];
        r.abs_err = std::abs(r.lambda - r.lambda_ref);
        r.converged = sp.converged;
        double sup = 0.0;
        for (const auto& [a, b] : rows) sup = std::max(sup, std::abs(aligned(a, i) - ref.spectrum.eigenvectors(b, i)));
        r.sup_err = sup;
        const Vector f = lift_dirichlet_boundary(g, sp.vector(i));
        r.domains = count_domains(g, f).count;
        const auto raw_set = extract_level_set(g, f);
        if (!raw_set.empty()) r.c_hat = wavelength_density(g, raw_set, r.lambda);
        if (k == 2) {
            r.payne = payne_check(g, raw_set, h).touches ? 1 : 0;
            if (!raw_set.empty() && !ref.second.empty()) r.hausdorff = hausdorff(raw_set, ref.second, 0.25 * h);
        }
        out.push_back(r);
    }
    return out;
}

/// Smallest nodal domain of the second eigenfunction against the Faber-Krahn floor pi j01^2 / lambda_2.
inline double faber_krahn_ratio(const IntrinsicMesh& g, const Spectrum& sp) {
    constexpr double j01 = 2.404825557695773;
    const auto d = count_domains(g, lift_dirichlet_boundary(g, sp.vector(1)));
    double smallest = std::numeric_limits<double>::infinity();
    for (double a : d.area) smallest = std::min(smallest, a);
    return smallest / (std::numbers::pi * j01 * j01 / sp.eigenvalues[1]);
}

/// Sweeps one family of Dirichlet domains; `build` returns the perturbed mesh for a radius.
inline void run_dirichlet_sweep(ExperimentReport& rep, const PayneConfig& cfg, const DirichletReference& ref,
                                const std::function<IntrinsicMesh(double)>& build, const std::vector<Region>& skip) {
    const auto sched = cfg.schedule();
    if (cfg.steps < 3) rep.flags.push_back("fewer than 3 halvings: too short for trend checks");
    const int n = static_cast<int>(sched.size());
    std::vector<std::vector<SweepRecord>> recs(n);
    std::vector<double> fk(n, kNaN);
    std::vector<std::string> errors(n);
    std::string overlay;  // nodal set of f_2 at the smallest radius
    parallel_for(n, cfg.threads, [&](int i) {
        try {
            const auto g = build(sched[i]);
            const auto sp = solve_lowest(assemble(g, BoundaryCondition::dirichlet), std::max(cfg.m, 2) + kExtraModes,
                                         cfg.tol, cfg.seed);
            if (!sp.converged) errors[i] = "solver did not converge at eps=" + fmt(sched[i]);
            recs[i] = dirichlet_records(g, sp, ref, sched[i], cfg.m, cfg.h, skip);
            fk[i] = faber_krahn_ratio(g, sp);
            if (i == n - 1) {
                std::ostringstream svg;
                write_nodal_svg(svg, g, extract_level_set(g, lift_dirichlet_boundary(g, sp.vector(1))));
                overlay = svg.str();
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numerical) throw;
            errors[i] = e.what();
        }
    });
    for (int i = 0; i < n; ++i) {
        if (!errors[i].empty()) rep.flags.push_back(errors[i]);
        if (recs[i].empty()) {
            for (int k = 1; k <= cfg.m; ++k) {
                SweepRecord r;
                r.eps = sched[i], r.k = k, r.converged = false;
                rep.records.push_back(r);
            }
            continue;
        }
        for (auto& r : recs[i]) rep.records.push_back(r);
        rep.series.push_back({"faber_krahn_ratio", sched[i], fk[i]});
        if (fk[i] < 1.0 - 0.05) rep.flags.push_back("second eigenfunction has a nodal domain below the Faber-Krahn floor at eps=" + fmt(sched[i]));
    }
    rep.sort_records();
    if (!overlay.empty()) rep.figures.emplace_back(rep.name + "_nodal.svg", overlay);
    rep.scalar("h", cfg.h);
    rep.scalar("gap_scale", ref.spectrum.eigenvalues[0]);
    rep.scalar("reference_lambda2", ref.spectrum.eigenvalues[1]);
    rep.scalar("reference_vertices", ref.mesh.vertex_count());
}

}  // namespace detail

/// Dirichlet rectangle with a disk of radius eps attached at a boundary point.
inline ExperimentReport run_payne_attachment(const PayneConfig& cfg) {
    cfg.validate();
    ExperimentReport rep;
    rep.name = "payne_attach";
    const auto omega = build_rectangle(cfg.width, cfg.height, cfg.h);
    const auto disk = build_disk(1.0, 0.2, cfg.loop_nodes);
    const auto sched = cfg.schedule();
    const double cut = cfg.cut();
    const auto patch = polar_patch(omega, cfg.attach_at, {cut, 0.0, sched.back(), cfg.loop_nodes, cfg.eps_max});
    if (!patch.on_boundary) fail(ErrorKind::invalid_input, "payne: attachment point must lie on the boundary");
    const auto ref = detail::dirichlet_reference(patch.mesh, cfg, std::max(cfg.m, 2) + kExtraModes);
    detail::run_dirichlet_sweep(
        rep, cfg, ref,
        [&](double eps) {
            AttachSpec a;
            a.epsilon = eps;
            a.x1 = cfg.attach_at;
            a.cut = cut;
            a.anchor = cfg.eps_max;
            a.loop_nodes = cfg.loop_nodes;
            return attach_domain(omega, disk, a).mesh;
        },
        {Region::omega2});
    return rep;
}

/// Dirichlet rectangle with holes of radius eps away from the nodal line of the second mode.
inline ExperimentReport run_payne_perforation(const PayneConfig& cfg) {
    cfg.validate();
    ExperimentReport rep;
    rep.name = "payne_perforate";
    const auto omega = build_rectangle(cfg.width, cfg.height, cfg.h);
    const auto sched = cfg.schedule();
    PerforationSpec spec;
    spec.centers = cfg.holes;
    spec.cut = cfg.cut();
    spec.anchor = cfg.eps_max;
    spec.loop_nodes = cfg.loop_nodes;
    const auto ref = detail::dirichlet_reference(perforation_reference(omega, spec, sched.back()).mesh, cfg,
                                                 std::max(cfg.m, 2) + kExtraModes);
    // centers must stay clear of the reference nodal line
    double clearance = std::numeric_limits<double>::infinity();
    for (const auto& c : spec.centers)
        for (const auto& s : ref.second.segments) clearance = std::min(clearance, detail::point_segment_distance(c, s.a, s.b));
    spec.clearance = clearance;
    rep.scalar("clearance", clearance);
    detail::run_dirichlet_sweep(
        rep, cfg, ref,
        [&](double eps) {
            PerforationSpec s = spec;
            s.radius = eps;
            return perforate(omega, s).mesh;
        },
        {});
    // lambda_2 must stay above the reference and decrease with eps
    const auto l2 = rep.at_k(2);
    bool above = true, decreasing = true;
    for (std::size_t i = 0; i < l2.size(); ++i) {
        above = above && l2[i]->lambda >= l2[i]->lambda_ref * (1 - 1e-9);
        if (i > 0) decreasing = decreasing && l2[i]->lambda < l2[i - 1]->lambda;
    }
    rep.scalar("lambda2_above_reference", above ? 1.0 : 0.0);
    rep.scalar("lambda2_decreasing", decreasing ? 1.0 : 0.0);
    return rep;
}

}  // namespace nodal_lab

namespace nodal_lab {

// ---------------------------------------------------------------- Lewy counts

struct LewyConfig {
    int subdivision = 4;
    std::vector<int> degrees{1, 2, 3};
    int budget = 10000;       // coefficient samples per cluster, refinement included
    std::string m2 = "torus:0.3";
    double eta = 0.1;
    int steps = 5;
    double cap = 0.3;
    double tol = 1e-9;
    unsigned seed = 42;
    int loop_nodes = 32;
    int threads = 0;

    static LewyConfig from(const Config& c) {
        LewyConfig l;
        l.subdivision = c.get("lewy.subdivision", l.subdivision);
        std::vector<double> d(l.degrees.begin(), l.degrees.end());
        d = c.get_list("lewy.degrees", d);
        l.degrees.clear();
        for (double x : d) {
            if (x != std::floor(x) || x < 1) fail(ErrorKind::invalid_input, "config: lewy.degrees needs positive integers");
            l.degrees.push_back(static_cast<int>(x));
        }
        l.budget = c.get("lewy.budget", l.budget);
        l.m2 = c.get("geometry.m2", l.m2);
        l.eta = c.get("geometry.eta", l.eta);
        l.steps = c.get("sweep.steps", l.steps);
        l.cap = c.get("sweep.cap", l.cap);
        l.tol = c.get("solve.tol", l.tol);
        l.seed = static_cast<unsigned>(c.get("seed", static_cast<int>(l.seed)));
        l.loop_nodes = c.get("surgery.loop_nodes", l.loop_nodes);
        l.threads = c.get("threads", l.threads);
        l.validate();
        return l;
    }

    void validate() const {
        require(subdivision >= 1 && subdivision <= 6, "config: lewy.subdivision must lie in 1..6");
        require(!degrees.empty(), "config: lewy.degrees must not be empty");
        require(budget >= 1 && budget <= 10000, "config: lewy.budget must lie in 1..10000");
        require(eta > 0 && steps >= 0 && cap > 0, "config: bad gluing parameters");
        require(tol > 0 && tol < 1e-2, "config: solve.tol must lie in (0, 1e-2)");
        require(loop_nodes >= 8 && loop_nodes % 2 == 0, "config: surgery.loop_nodes must be even and >= 8");
    }
};

struct LewySearch {
    int degree = 0;
    int min_domains = 0;
    int max_domains = 0;
    int samples = 0;
    Vector best;  // coefficients in the cluster basis
    double spread = 0.0;  // relative eigenvalue spread of the cluster
    double robustness = 0.0;  // share of perturbed coefficient vectors keeping the minimal count
};

/// Smallest nodal domain count over combinations of the columns of `block`.
/// Axis directions first, then Gaussian directions. Among the minimizers found, the one whose count
/// survives most small perturbations of the coefficients is kept, since a minimizer sitting next to a
/// degenerate saddle would not survive any change of the metric.
inline LewySearch lewy_search(const IntrinsicMesh& mesh, const Matrix& block, int budget, unsigned seed) {
    const int d = static_cast<int>(block.cols());
    require(d >= 1 && budget >= 1, "lewy_search: empty cluster or budget");
    LewySearch out;
    out.min_domains = std::numeric_limits<int>::max();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<Vector> minimizers;
    constexpr std::size_t kKeep = 12;
    auto evaluate = [&](const Vector& c) {
        const int n = count_domains(mesh, block * c).count;
        ++out.samples;
        out.max_domains = std::max(out.max_domains, n);
        return n;
    };
    auto offer = [&](const Vector& c) {
        const int n = evaluate(c);
        if (n < out.min_domains) out.min_domains = n, minimizers.clear();
        if (n == out.min_domains && minimizers.size() < kKeep) minimizers.push_back(c);
    };
    auto gaussian = [&] {
        Vector c(d);
        for (int i = 0; i < d; ++i) c[i] = normal(rng);
        return Vector(c / c.norm());
    };
    for (int i = 0; i < d && out.samples < budget; ++i) offer(Vector::Unit(d, i));
    const int probes = std::clamp(budget / 50, 1, 40);
    const int global = std::max(out.samples, budget - static_cast<int>(kKeep) * probes);
    while (out.samples < global) offer(gaussian());

    constexpr double kProbe = 0.15;
    int best_score = -1;
    for (const auto& c : minimizers) {
        int kept = 0;
        for (int t = 0; t < probes && out.samples < budget; ++t)
            kept += evaluate((c + kProbe * gaussian()).normalized()) == out.min_domains;
        if (kept > best_score) best_score = kept, out.best = c;
    }
    out.robustness = probes > 0 ? static_cast<double>(std::max(best_score, 0)) / probes : 0.0;
    return out;
}

/// Eigenvalues l^2 .. l^2+2l form a tight cluster (spread below 5%) separated from both neighbours
/// by more than ten times that spread.
inline bool degree_cluster_resolved(const Spectrum& s, int l) {
    const int a = l * l, b = l * l + 2 * l;
    if (l < 1 || b + 1 >= s.size()) return false;
    const double inside = s.eigenvalues[b] - s.eigenvalues[a];
    const double gap = std::min(s.eigenvalues[a] - s.eigenvalues[a - 1], s.eigenvalues[b + 1] - s.eigenvalues[b]);
    return inside <= 0.05 * 0.5 * (s.eigenvalues[a] + s.eigenvalues[b]) && gap > 10.0 * inside;
}

/// Consecutive glued indices whose eigenvalues best match the sorted target values.
inline int match_cluster(const Spectrum& s, const std::vector<double>& target) {
    const int d = static_cast<int>(target.size());
    int best = -1;
    double cost = std::numeric_limits<double>::infinity();
    for (int j = 1; j + d <= s.size(); ++j) {
        double c = 0.0;
        for (int t = 0; t < d; ++t) c += std::abs(s.eigenvalues[j + t] - target[t]);
        if (c < cost) cost = c, best = j;
    }
    return best;
}

/// Lewy minima on the round sphere, then the minimizing combinations carried to the sphere glued to M2.
inline ExperimentReport run_lewy(const LewyConfig& cfg) {
    cfg.validate();
    ExperimentReport rep;
    rep.name = "lewy";
    const auto sphere = build_sphere(cfg.subdivision);
    const int top = *std::max_element(cfg.degrees.begin(), cfg.degrees.end());
    const int count = (top + 1) * (top + 1) - 1;
    const auto sp = solve_lowest(assemble(sphere, BoundaryCondition::closed), count + kExtraModes, cfg.tol, cfg.seed);
    if (!sp.converged) fail(ErrorKind::numerical, "lewy: sphere spectrum did not converge");

    const int nd = static_cast<int>(cfg.degrees.size());
    std::vector<LewySearch> found(nd);
    detail::parallel_for(nd, cfg.threads, [&](int i) {
        const int l = cfg.degrees[i];
        const Matrix block = sp.eigenvectors.middleCols(l * l, 2 * l + 1);
        found[i] = lewy_search(sphere, block, cfg.budget, cfg.seed + static_cast<unsigned>(l));
        const double lo = sp.eigenvalues[l * l], hi = sp.eigenvalues[l * l + 2 * l];
        found[i].spread = (hi - lo) / (0.5 * (hi + lo));
    });
    for (int l : cfg.degrees)
        if (!degree_cluster_resolved(sp, l))
            fail(ErrorKind::invalid_input, "lewy: degree " + std::to_string(l) + " cluster is not resolved on this mesh");
    for (int i = 0; i < nd; ++i) {
        const int l = cfg.degrees[i];
        found[i].degree = l;
        rep.scalar("sphere_min_domains_l" + std::to_string(l), found[i].min_domains);
        rep.scalar("sphere_max_domains_l" + std::to_string(l), found[i].max_domains);
        rep.scalar("samples_l" + std::to_string(l), found[i].samples);
        rep.scalar("robustness_l" + std::to_string(l), found[i].robustness);
    }

    // x1 as far as possible from every minimizing nodal set
    std::vector<double> clearance(sphere.vertex_count(), std::numeric_limits<double>::infinity());
    for (int i = 0; i < nd; ++i) {
        const int l = cfg.degrees[i];
        const Vector f = sp.eigenvectors.middleCols(l * l, 2 * l + 1) * found[i].best;
        const auto dist = distance_to_zero_set(sphere, extract_level_set(sphere, f));
        for (int v = 0; v < sphere.vertex_count(); ++v) clearance[v] = std::min(clearance[v], dist[v]);
    }
    const int x1 = static_cast<int>(std::max_element(clearance.begin(), clearance.end()) - clearance.begin());
    const double eps0 = std::min(clearance[x1] / 3.0, cfg.cap);
    const double eps = 0.8 * eps0 * std::pow(2.0, -cfg.steps);
    rep.scalar("x1_vertex", x1);
    rep.scalar("clearance", clearance[x1]);
    rep.scalar("eps0", eps0);
    rep.scalar("eps", eps);

    const auto m2 = parse_geometry(cfg.m2);
    GluedSpec gs;
    gs.epsilon = eps;
    gs.epsilon0 = eps0;
    gs.x1 = sphere.points[x1];
    gs.x2 = default_x2(m2);
    gs.m2_radius = cfg.eta;
    gs.loop_nodes = cfg.loop_nodes;
    const auto glued = connected_sum(sphere, m2, gs);
    const auto& g = glued.mesh;
    rep.scalar("glued_euler_characteristic", g.euler_characteristic());
    const auto gsp = solve_lowest(assemble(g, BoundaryCondition::closed), count + kExtraModes, cfg.tol, cfg.seed);
    if (!gsp.converged) fail(ErrorKind::numerical, "lewy: glued spectrum did not converge");

    const auto match = detail::match_vertices(g, sphere);
    std::vector<std::pair<int, int>> rows;
    std::vector<char> bulk(g.vertex_count(), 0);
    for (int t = 0; t < g.triangle_count(); ++t)
        if (g.regions[t] == Region::m1_bulk)
            for (int v : g.triangles[t]) bulk[v] = 1;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (bulk[v] && match[v] >= 0) rows.emplace_back(v, match[v]);
    const auto weight = detail::vertex_areas(sphere);

    for (int i = 0; i < nd; ++i) {
        const int l = cfg.degrees[i], d = 2 * l + 1;
        std::vector<double> target(sp.eigenvalues.begin() + l * l, sp.eigenvalues.begin() + l * l + d);
        const int j = match_cluster(gsp, target);
        const Matrix gb = gsp.eigenvectors.middleCols(j, d);
        const Matrix aligned = gb * detail::procrustes(gb, sp.eigenvectors.middleCols(l * l, d), rows, weight);
        const Vector f = aligned * found[i].best;
        const int n = count_domains(g, f).count;
        const auto verdict = classify_containment(g, extract_level_set(g, f)).kind;
        SweepRecord r;
        r.eps = eps;
        r.k = l;
        r.lambda = gsp.eigenvalues[j];
        r.lambda_ref = sp.eigenvalues[l * l];
        r.abs_err = std::abs(r.lambda - r.lambda_ref);
        r.domains = n;
        r.verdict = std::string(to_string(verdict));
        r.converged = gsp.converged;
        rep.records.push_back(r);
        rep.scalar("glued_domains_l" + std::to_string(l), n);
        rep.scalar("glued_cluster_start_l" + std::to_string(l), j);
        if (n != found[i].min_domains)
            rep.flags.push_back("degree " + std::to_string(l) + ": domain count changed after gluing");
    }
    return rep;
}

}  // namespace nodal_lab
