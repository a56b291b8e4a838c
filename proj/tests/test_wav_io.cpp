#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "opdkit/wav_io.hpp"
#include "test_support.hpp"

using namespace opdkit;
using opdkit::testing::wf;

namespace {

Waveform random_waveform(std::mt19937_64& rng, std::size_t n, int rate) {
    std::uniform_real_distribution<double> u(-0.99, 0.99);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return wf(v, rate);
}

} // namespace

// Round trip through each format preserves rate, length and samples up to the
// format's quantization step.
TEST(WavIo, RoundTripWithinQuantization) {
    std::mt19937_64 rng(3);
    const std::pair<wav::SampleFormat, double> formats[] = {
        {wav::SampleFormat::Pcm16, 0.5 / 32768.0},
        {wav::SampleFormat::Float32, 1e-7},
        {wav::SampleFormat::Float64, 0.0},
    };
    for (int trial = 0; trial < 20; ++trial) {
        const int rate = trial % 2 ? 16000 : 44100;
        const auto w = random_waveform(rng, 1 + rng() % 300, rate);
        for (auto [format, tol] : formats) {
            const auto back = wav::decode(wav::encode(w, format));
            ASSERT_EQ(back.size(), w.size());
            ASSERT_EQ(back.sample_rate(), rate);
            for (std::size_t i = 0; i < w.size(); ++i) ASSERT_NEAR(back[i], w[i], tol);
        }
    }
}

TEST(WavIo, Pcm16ClipsOutOfRange) {
    const auto back = wav::decode(wav::encode(wf({2.0, -2.0}), wav::SampleFormat::Pcm16));
    EXPECT_DOUBLE_EQ(back[0], 32767.0 / 32768.0);
    EXPECT_DOUBLE_EQ(back[1], -1.0);
}

TEST(WavIo, RejectsMultiChannel) {
    auto bytes = wav::encode(wf({0.1, 0.2, 0.3, 0.4}), wav::SampleFormat::Pcm16);
    bytes[22] = 2; // channel count
    EXPECT_THROW(wav::decode(bytes), ValidationError);
}

TEST(WavIo, RejectsGarbageAndUnsupportedFormats) {
    EXPECT_THROW(wav::decode({'n', 'o', 'p', 'e'}), ValidationError);
    auto bytes = wav::encode(wf({0.1, 0.2}), wav::SampleFormat::Pcm16);
    bytes[34] = 8; // bits per sample
    EXPECT_THROW(wav::decode(bytes), ValidationError);
}

TEST(WavIo, FileRoundTripAndMissingFile) {
    opdkit::testing::TempDir dir;
    const auto w = wf({0.25, -0.5, 0.125});
    wav::write(dir / "x.wav", w, wav::SampleFormat::Float32);
    EXPECT_EQ(wav::read(dir / "x.wav"), w);
    EXPECT_THROW(wav::read(dir / "missing.wav"), IoError);
}

TEST(WavIo, SkipsUnknownChunks) {
    auto bytes = wav::encode(wf({0.5, -0.5}), wav::SampleFormat::Float64);
    // Insert a LIST chunk between fmt and data.
    const std::vector<std::uint8_t> list{'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
    bytes.insert(bytes.begin() + 36, list.begin(), list.end());
    EXPECT_EQ(wav::decode(bytes), wf({0.5, -0.5}));
}
