#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nodal_lab/error.hpp"

namespace nodal_lab {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One (epsilon, k) row of an experiment. NaN fields are "not applicable".
struct SweepRecord {
    double eps = kNaN;
    int k = 0;
    double lambda = kNaN;
    double lambda_ref = kNaN;
    double abs_err = kNaN;
    double sup_err = kNaN;      // sup-norm error on the bulk after subspace alignment
    std::string verdict;        // containment verdict, empty if not classified
    double hausdorff = kNaN;    // to the reference nodal set
    int payne = -1;             // -1 not checked, 0 false, 1 true
    int domains = -1;           // nodal domain count, -1 if not counted
    double c_hat = kNaN;        // sqrt(lambda) * max distance to the zero set
    bool converged = true;
};

struct SeriesPoint {
    std::string series;
    double x = kNaN;
    double y = kNaN;
};

struct ExperimentReport {
    std::string name;
    std::vector<SweepRecord> records;
    std::vector<std::pair<std::string, double>> scalars;  // in insertion order
    std::vector<SeriesPoint> series;
    std::vector<std::string> flags;                      // failures and warnings
    std::vector<std::pair<std::string, std::string>> figures;  // file name, SVG text

    void scalar(const std::string& key, double value) { scalars.emplace_back(key, value); }

    double get(const std::string& key) const {
        for (const auto& [k, v] : scalars)
            if (k == key) return v;
        return kNaN;
    }

    std::vector<const SweepRecord*> at_k(int k) const {
        std::vector<const SweepRecord*> out;
        for (const auto& r : records)
            if (r.k == k) out.push_back(&r);
        return out;
    }

    void sort_records() {
        std::stable_sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
            return a.eps != b.eps ? a.eps > b.eps : a.k < b.k;
        });
    }
};

namespace detail {

inline std::string fmt(double x) {
    if (std::isnan(x)) return "";
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace detail

inline void write_records_csv(std::ostream& os, const ExperimentReport& r) {
    os << "eps,k,lambda,lambda_ref,abs_err,sup_err,verdict,hausdorff,payne,domains,c_hat,converged\n";
    for (const auto& x : r.records) {
        os << detail::fmt(x.eps) << ',' << x.k << ',' << detail::fmt(x.lambda) << ',' << detail::fmt(x.lambda_ref) << ','
           << detail::fmt(x.abs_err) << ',' << detail::fmt(x.sup_err) << ',' << x.verdict << ','
           << detail::fmt(x.hausdorff) << ',' << (x.payne < 0 ? "" : (x.payne ? "true" : "false")) << ','
           << (x.domains < 0 ? "" : std::to_string(x.domains)) << ',' << detail::fmt(x.c_hat) << ','
           << (x.converged ? "true" : "false") << '\n';
    }
}

inline void write_summary_csv(std::ostream& os, const ExperimentReport& r) {
    os << "key,value\n";
    for (const auto& [k, v] : r.scalars) os << k << ',' << detail::fmt(v) << '\n';
    for (const auto& f : r.flags) os << "flag," << f << '\n';
}

inline void write_series_csv(std::ostream& os, const ExperimentReport& r) {
    os << "series,x,y\n";
    for (const auto& p : r.series) os << p.series << ',' << detail::fmt(p.x) << ',' << detail::fmt(p.y) << '\n';
}

/// Log-log plot of |lambda_k(eps) - lambda_k(ref)| against eps, one polyline per k.
inline std::string error_plot_svg(const ExperimentReport& r) {
    const double w = 480, h = 360, pad = 50;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& x : r.records)
        if (x.eps > 0 && x.abs_err > 0) {
            x0 = std::min(x0, std::log10(x.eps)), x1 = std::max(x1, std::log10(x.eps));
            y0 = std::min(y0, std::log10(x.abs_err)), y1 = std::max(y1, std::log10(x.abs_err));
        }
    std::ostringstream os;
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << pad << "\" y=\"20\" font-size=\"12\">" << r.name << ": log10 |error| vs log10 eps</text>\n";
    if (x0 <= x1) {
        if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
        if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
        auto px = [&](double v) { return pad + (w - 2 * pad) * (v - x0) / (x1 - x0); };
        auto py = [&](double v) { return h - pad - (h - 2 * pad) * (v - y0) / (y1 - y0); };
        os << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\"" << h - pad
           << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
           << "\" stroke=\"black\"/>\n";
        std::vector<int> ks;
        for (const auto& x : r.records)
            if (std::find(ks.begin(), ks.end(), x.k) == ks.end()) ks.push_back(x.k);
        static const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"};
        for (std::size_t i = 0; i < ks.size(); ++i) {
            std::ostringstream pts;
            pts << std::setprecision(6);
            int count = 0;
            for (const auto* x : r.at_k(ks[i]))
                if (x->eps > 0 && x->abs_err > 0) {
                    pts << px(std::log10(x->eps)) << ',' << py(std::log10(x->abs_err)) << ' ';
                    ++count;
                }
            if (count == 0) continue;
            os << "<polyline fill=\"none\" stroke=\"" << colors[i % 8] << "\" points=\"" << pts.str() << "\"/>\n";
            os << "<text x=\"" << w - pad + 4 << "\" y=\"" << pad + 14 * i << "\" font-size=\"10\" fill=\"" << colors[i % 8]
               << "\">k=" << ks[i] << "</text>\n";
        }
        os << "<text x=\"" << pad << "\" y=\"" << h - 15 << "\" font-size=\"10\">" << x0 << " .. " << x1 << "</text>\n";
        os << "<text x=\"5\" y=\"" << pad - 5 << "\" font-size=\"10\">" << y1 << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

/// Writes <name>.csv, <name>_summary.csv, <name>_series.csv, <name>_errors.svg and any figures.
inline std::vector<std::string> emit_report(const ExperimentReport& r, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create output directory " + dir + ": " + ec.message());
    std::vector<std::string> written;
    auto put = [&](const std::string& file, const std::string& text) {
        const std::string path = (fs::path(dir) / file).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(ErrorKind::io, "cannot write " + path);
        out << text;
        if (!out) fail(ErrorKind::io, "write failed for " + path);
        written.push_back(path);
    };
    std::ostringstream a, b, c;
    write_records_csv(a, r);
    write_summary_csv(b, r);
    write_series_csv(c, r);
    put(r.name + ".csv", a.str());
    put(r.name + "_summary.csv", b.str());
    put(r.name + "_series.csv", c.str());
    put(r.name + "_errors.svg", error_plot_svg(r));
    for (const auto& [file, svg] : r.figures) put(file, svg);
    return written;
}

}  // namespace nodal_lab
