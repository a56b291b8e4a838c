#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "opdkit/report.hpp"

using namespace opdkit;
using namespace opdkit::report;

TEST(Report, FormatDb) {
    EXPECT_EQ(format_db(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_db(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(format_db(std::nan("")), "nan");
    EXPECT_EQ(std::stod(format_db(0.1 + 0.2)), 0.1 + 0.2);
    EXPECT_EQ(std::stod(format_db(19.294189257142927)), 19.294189257142927);
}

TEST(Report, JsonDbRoundTrip) {
    for (double v : {1.5, -3.25, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}) {
        EXPECT_EQ(db_from_json(db_to_json(v)), v);
    }
    EXPECT_TRUE(std::isnan(db_from_json(db_to_json(std::nan("")))));
    EXPECT_EQ(db_to_json(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Report, SweepCsvSchema) {
    SweepRow ok;
    ok.utterance_id = "a";
    ok.omega_obs = 0.5;
    ok.metrics.sdr_db = 1.0;
    ok.metrics.snr_db = 2.0;
    ok.metrics.sar_db = std::numeric_limits<double>::infinity();
    ok.inner_s_hat_y = 3.0;
    ok.sari_closed_form_db = 0.25;
    SweepRow bad;
    bad.utterance_id = "b,c";
    bad.error = "validation: boom";

    const auto csv = sweep_csv({ok, bad});
    EXPECT_EQ(csv,
              "utterance_id,omega_noise,omega_artif,omega_obs,sdr_db,snr_db,sar_db,inner_s_hat_y,sari_closed_form_db,error\n"
              "a,,,0.5,1,2,inf,3,0.25,\n"
              "\"b,c\",,,,,,,,,validation: boom\n");
}

TEST(Report, SummarizeAveragesDbPerPoint) {
    std::vector<SweepRow> rows;
    for (int u = 0; u < 2; ++u) {
        for (double w : {0.0, 1.0}) {
            SweepRow r;
            r.utterance_id = "u" + std::to_string(u);
            r.omega_obs = w;
            r.metrics.sdr_db = u + w;
            r.metrics.snr_db = 10 * u;
            r.metrics.sar_db = w;
            rows.push_back(r);
        }
    }
    SweepRow failed;
    failed.error = "x";
    rows.push_back(failed);

    const auto summary = summarize(rows);
    ASSERT_EQ(summary.size(), 2u);
    EXPECT_EQ(*summary[0].omega_obs, 0.0);
    EXPECT_DOUBLE_EQ(summary[0].sdr_db, 0.5);
    EXPECT_DOUBLE_EQ(summary[1].sdr_db, 1.5);
    EXPECT_DOUBLE_EQ(summary[1].snr_db, 5.0);
    EXPECT_EQ(summary[1].utterances, 2u);
}

TEST(Report, SvgIsDeterministicAndSkipsNonFinite) {
    Panel p{"SAR", "w", "dB", {Series{"m", {{0, 1}, {1, std::numeric_limits<double>::infinity()}, {2, 3}}}}};
    const auto a = render_svg({p, p}, 2);
    EXPECT_EQ(a, render_svg({p, p}, 2));
    EXPECT_NE(a.find("<svg"), std::string::npos);
    EXPECT_EQ(a.find("inf"), std::string::npos);
    EXPECT_EQ(a.find("nan"), std::string::npos);
}
