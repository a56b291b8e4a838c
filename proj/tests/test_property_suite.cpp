#include <gtest/gtest.h>

#include <sstream>

#include "opdkit/self_test.hpp"

using namespace opdkit;

TEST(PropertySuite, DefaultRunPasses) {
    const auto report = run_property_suite(200, 20240611);
    std::ostringstream os;
    os << report;
    EXPECT_TRUE(report.passed()) << os.str();
    EXPECT_EQ(report.cases, 200u);
    for (const auto& r : report.invariants) EXPECT_GT(r.checks, 0u) << r.name;
}

TEST(PropertySuite, RejectsZeroCases) { EXPECT_THROW(run_property_suite(0, 1), ValidationError); }

TEST(PropertySuite, ParallelMatchesSerial) {
    const auto a = run_property_suite(12, 5, 1);
    const auto b = run_property_suite(12, 5, 3);
    ASSERT_EQ(a.invariants.size(), b.invariants.size());
    for (std::size_t i = 0; i < a.invariants.size(); ++i) {
        EXPECT_EQ(a.invariants[i].max_deviation, b.invariants[i].max_deviation) << a.invariants[i].name;
    }
}
