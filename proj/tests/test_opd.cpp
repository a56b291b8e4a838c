#include <gtest/gtest.h>

#include "opdkit/dense_oracle.hpp"
#include "opdkit/opd.hpp"
#include "opdkit/synth.hpp"
#include "test_support.hpp"

using namespace opdkit;
using opdkit::testing::RunningExample;
using opdkit::testing::wf;

namespace {

void expect_waveform_near(const Waveform& got, const Waveform& want, double tol) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "sample " << i;
}

} // namespace

TEST(Decompose, PerfectEnhancement) {
    const RunningExample ex;
    const auto d = decompose(ex.speech, ex.speech, ex.noise, 1);
    expect_waveform_near(d.target, ex.speech, 1e-14);
    expect_waveform_near(d.noise_error, Waveform::zeros(4, ex.speech.sample_rate()), 1e-14);
    expect_waveform_near(d.artifact_error, Waveform::zeros(4, ex.speech.sample_rate()), 1e-14);
    EXPECT_TRUE(d.artifact_free);
}

TEST(Decompose, ObservationHasNoArtifact) {
    const RunningExample ex;
    const auto d = decompose(ex.observation, ex.speech, ex.noise, 1);
    expect_waveform_near(d.target, ex.speech, 1e-14);
    expect_waveform_near(d.noise_error, ex.noise, 1e-14);
    expect_waveform_near(d.artifact_error, Waveform::zeros(4, ex.speech.sample_rate()), 1e-14);
    EXPECT_TRUE(d.artifact_free);
}

TEST(Decompose, RunningExample) {
    const RunningExample ex;
    const auto d = decompose(ex.enhanced, ex.speech, ex.noise, 1);
    expect_waveform_near(d.target, wf({0.9, 0, 0, 0}), 1e-14);
    expect_waveform_near(d.noise_error, wf({0, 0.2, 0, 0}), 1e-14);
    expect_waveform_near(d.artifact_error, wf({0, 0, 0.1, 0}), 1e-14);
    EXPECT_FALSE(d.artifact_free);
    EXPECT_EQ(d.max_delay, 1u);
    expect_waveform_near(recompose(d), wf({0.9, 0.2, 0.1, 0}), 1e-14);
}

TEST(Decompose, Errors) {
    const RunningExample ex;
    EXPECT_THROW(decompose(wf({1, 2, 3}), ex.speech, ex.noise, 1), ValidationError);
    EXPECT_THROW(decompose(ex.enhanced, ex.speech, Waveform::zeros(4, ex.speech.sample_rate()), 1), ValidationError);
    EXPECT_THROW(decompose(ex.enhanced, ex.speech, wf({0, 1, 0}), 1), ValidationError);
    EXPECT_THROW(decompose(ex.enhanced, ex.speech, ex.noise, 5), ValidationError);
}

TEST(Recompose, ZeroComponents) {
    const auto z = Waveform::zeros(5, 8000);
    const Decomposition d{z, z, z, 1, {}, true};
    EXPECT_EQ(recompose(d), z);
}

class DecompositionProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(DecompositionProperties, Invariants) {
    const std::size_t L = std::vector<std::size_t>{1, 4, 16}[GetParam() % 3];
    const auto c = synth::make_oracle_case(GetParam(), L);
    const Decomposer dec(c.speech, c.noise, L);
    const auto d = dec(c.enhanced);

    EXPECT_LE(relative_error(recompose(d), c.enhanced), 1e-10);
    EXPECT_LE(relative_error(d.target, project_dense_oracle({c.speech}, L, c.enhanced)), 1e-8);
    EXPECT_LE(relative_error(d.projected(), project_dense_oracle({c.speech, c.noise}, L, c.enhanced)), 1e-8);

    for (std::size_t tau = 0; tau < L; ++tau) {
        const auto ds = delayed(c.speech, tau);
        const auto dn = delayed(c.noise, tau);
        EXPECT_LE(std::abs(inner(d.artifact_error, ds)), 1e-8 * norm(d.artifact_error) * norm(ds));
        EXPECT_LE(std::abs(inner(d.artifact_error, dn)), 1e-8 * norm(d.artifact_error) * norm(dn));
        EXPECT_LE(std::abs(inner(d.noise_error, ds)), 1e-8 * norm(d.noise_error) * norm(ds));
    }

    const double e = energy(c.enhanced);
    EXPECT_NEAR(e, energy(d.projected()) + energy(d.artifact_error), 1e-8 * e);

    // Re-decomposing a rescaled recombination returns the rescaled parts.
    for (auto [a, b] : {std::pair{0.3, 1.7}, std::pair{-2.0, 0.0}, std::pair{1.0, -0.5}}) {
        const auto mixed = add_scaled(add_scaled(d.target, d.noise_error, a), d.artifact_error, b);
        const auto again = dec(mixed);
        EXPECT_LE(relative_error(again.target, d.target), 1e-8);
        EXPECT_LE(norm(subtract(again.noise_error, scale(d.noise_error, a))), 1e-8 * norm(d.noise_error));
        EXPECT_LE(norm(subtract(again.artifact_error, scale(d.artifact_error, b))), 1e-8 * norm(d.artifact_error));
    }

    const auto mixture = dec(dec.observation());
    EXPECT_LE(norm(mixture.artifact_error), 1e-8 * norm(dec.observation()));
    EXPECT_TRUE(mixture.artifact_free);
}

INSTANTIATE_TEST_SUITE_P(Seeds, DecompositionProperties, ::testing::Range<std::uint64_t>(1000, 1030));
