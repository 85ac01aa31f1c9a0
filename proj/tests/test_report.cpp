#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "nodal_lab/report.hpp"

using namespace nodal_lab;

namespace {

std::string records_csv(const ExperimentReport& r) {
    std::ostringstream os;
    write_records_csv(os, r);
    return os.str();
}

ExperimentReport sample() {
    ExperimentReport r;
    r.name = "sample";
    for (double eps : {0.05, 0.1})
        for (int k : {2, 1}) {
            SweepRecord x;
            x.eps = eps;
            x.k = k;
            x.lambda = 2.0 + eps;
            x.lambda_ref = 2.0;
            x.abs_err = eps / k;
            x.verdict = "CASE_C";
            x.payne = k == 2;
            x.domains = k + 1;
            r.records.push_back(x);
        }
    r.scalar("slope", -2.0);
    r.series.push_back({"s", 1.0, kNaN});
    r.flags.push_back("something odd");
    return r;
}

}  // namespace

TEST(Report, EmptyReportHasOnlyHeaders) {
    ExperimentReport r;
    r.name = "empty";
    EXPECT_EQ(records_csv(r), "eps,k,lambda,lambda_ref,abs_err,sup_err,verdict,hausdorff,payne,domains,c_hat,converged\n");
    std::ostringstream s, t;
    write_summary_csv(s, r);
    write_series_csv(t, r);
    EXPECT_EQ(s.str(), "key,value\n");
    EXPECT_EQ(t.str(), "series,x,y\n");
}

TEST(Report, RowFormatting) {
    ExperimentReport r;
    SweepRecord x;
    x.eps = 0.1;
    x.k = 3;
    r.records.push_back(x);
    // round-trip precision; NaN and unset fields print empty
    EXPECT_EQ(records_csv(r).substr(records_csv(r).find('\n') + 1), "0.10000000000000001,3,,,,,,,,,,true\n");
}

TEST(Report, SortsByDescendingEpsThenK) {
    auto r = sample();
    r.sort_records();
    ASSERT_EQ(r.records.size(), 4u);
    EXPECT_EQ(r.records[0].eps, 0.1);
    EXPECT_EQ(r.records[0].k, 1);
    EXPECT_EQ(r.records[1].k, 2);
    EXPECT_EQ(r.records[3].eps, 0.05);
    EXPECT_EQ(r.get("slope"), -2.0);
    EXPECT_TRUE(std::isnan(r.get("absent")));
    EXPECT_EQ(r.at_k(2).size(), 2u);
}

TEST(Report, SvgIsWellFormed) {
    for (const auto& r : {sample(), ExperimentReport{}}) {
        const std::string svg = error_plot_svg(r);
        EXPECT_EQ(svg.rfind("<svg ", 0), 0u);
        EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
        // every element is either self-closing or a text element with its closing tag
        const std::regex open("<(\\w+)[^>]*?(/?)>");
        int texts = 0, closes = 0;
        for (auto it = std::sregex_iterator(svg.begin(), svg.end(), open); it != std::sregex_iterator(); ++it) {
            const std::string tag = (*it)[1];
            if (tag == "svg") continue;
            if (tag == "text") ++texts;
            else EXPECT_EQ((*it)[2], "/") << tag;
        }
        for (auto p = svg.find("</text>"); p != std::string::npos; p = svg.find("</text>", p + 1)) ++closes;
        EXPECT_EQ(texts, closes);
    }
    EXPECT_NE(error_plot_svg(sample()).find("<polyline"), std::string::npos);
}

TEST(Report, EmitWritesAllFiles) {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "nodal_lab_report_test";
    fs::remove_all(dir);
    auto r = sample();
    r.figures.emplace_back("extra.svg", "<svg xmlns=\"http://www.w3.org/2000/svg\"></svg>\n");
    const auto files = emit_report(r, dir.string());
    EXPECT_EQ(files.size(), 5u);
    for (const auto& f : files) EXPECT_TRUE(fs::exists(f));
    std::ifstream in(dir / "sample_summary.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "key,value\nslope,-2\nflag,something odd\n");

    // a regular file where the directory should be
    const auto blocker = dir / "blocker";
    std::ofstream(blocker) << "x";
    try {
        emit_report(r, (blocker / "sub").string());
        FAIL() << "expected an io error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io);
    }
}
