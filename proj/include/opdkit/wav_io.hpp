#pragma once

// Minimal RIFF/WAVE reader and writer for mono PCM-16 and IEEE float
// (32- and 64-bit) files.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "opdkit/errors.hpp"
#include "opdkit/waveform.hpp"

namespace opdkit::wav {

enum class SampleFormat { Pcm16, Float32, Float64 };

inline SampleFormat parse_sample_format(const std::string& name) {
    if (name == "pcm16") return SampleFormat::Pcm16;
    if (name == "float32") return SampleFormat::Float32;
    if (name == "float64") return SampleFormat::Float64;
    throw ValidationError("unknown WAV sample format '" + name + "' (expected pcm16, float32 or float64)");
}

inline const char* to_string(SampleFormat format) {
    switch (format) {
    case SampleFormat::Pcm16: return "pcm16";
    case SampleFormat::Float32: return "float32";
    case SampleFormat::Float64: return "float64";
    }
    return "unknown";
}

namespace detail {

static_assert(std::endian::native == std::endian::little, "WAV codec assumes a little-endian host");

inline std::uint16_t read_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

inline std::uint32_t read_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

inline void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

} // namespace detail

inline Waveform decode(const std::vector<std::uint8_t>& bytes, const std::string& origin = "<memory>") {
    using namespace detail;
    auto fail = [&](const std::string& why) { return ValidationError(origin + ": " + why); };

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw fail("not a RIFF/WAVE file");
    }

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const std::uint8_t* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint8_t* chunk = bytes.data() + pos;
        const std::uint32_t size = read_u32(chunk + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size()) {
            // Truncated trailing chunk; tolerate a short data chunk only.
            if (std::memcmp(chunk, "data", 4) != 0) throw fail("truncated chunk");
        }
        const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (avail < 16) throw fail("fmt chunk too short");
            format = read_u16(chunk + 8);
            channels = read_u16(chunk + 10);
            rate = read_u32(chunk + 12);
            bits = read_u16(chunk + 22);
            if (format == kFormatExtensible) {
                if (avail < 40) throw fail("extensible fmt chunk too short");
                format = read_u16(chunk + 8 + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = avail;
        }
        pos = body + size + (size & 1u);
    }

    if (!have_fmt) throw fail("missing fmt chunk");
    if (data == nullptr) throw fail("missing data chunk");
    if (channels != 1) {
        throw fail("expected mono audio, got " + std::to_string(channels) + " channels");
    }
    if (rate == 0 || rate > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
        throw fail("invalid sample rate");
    }

    std::vector<double> samples;
    if (format == kFormatPcm && bits == 16) {
        samples.resize(data_size / 2);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto raw = static_cast<std::int16_t>(read_u16(data + 2 * i));
            samples[i] = static_cast<double>(raw) / 32768.0;
        }
    } else if (format == kFormatFloat && bits == 32) {
        samples.resize(data_size / 4);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            float v;
            std::memcpy(&v, data + 4 * i, 4);
            samples[i] = v;
        }
    } else if (format == kFormatFloat && bits == 64) {
        samples.resize(data_size / 8);
        for (std::size_t i = 0; i < samples.size(); ++i) std::memcpy(&samples[i], data + 8 * i, 8);
    } else {
        throw fail("unsupported sample format (format tag " + std::to_string(format) + ", " +
                   std::to_string(bits) + " bits)");
    }
    if (samples.empty()) throw fail("no samples");
    return Waveform(std::move(samples), static_cast<int>(rate));
}

inline std::vector<std::uint8_t> encode(const Waveform& w, SampleFormat format) {
    using namespace detail;
    const std::uint16_t bits = format == SampleFormat::Pcm16 ? 16 : (format == SampleFormat::Float32 ? 32 : 64);
    const std::uint16_t tag = format == SampleFormat::Pcm16 ? kFormatPcm : kFormatFloat;
    const std::uint32_t block = bits / 8;
    const std::uint32_t data_size = static_cast<std::uint32_t>(w.size() * block);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_size);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, tag);
    put_u16(out, 1);
    put_u32(out, static_cast<std::uint32_t>(w.sample_rate()));
    put_u32(out, static_cast<std::uint32_t>(w.sample_rate()) * block);
    put_u16(out, static_cast<std::uint16_t>(block));
    put_u16(out, bits);
    put_tag(out, "data");
    put_u32(out, data_size);

    for (double x : w.samples()) {
        switch (format) {
        case SampleFormat::Pcm16: {
            const double q = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
            put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
            break;
        }
        case SampleFormat::Float32: {
            const float f = static_cast<float>(x);
            std::array<std::uint8_t, 4> raw;
            std::memcpy(raw.data(), &f, 4);
            out.insert(out.end(), raw.begin(), raw.end());
            break;
        }
        case SampleFormat::Float64: {
            std::array<std::uint8_t, 8> raw;
            std::memcpy(raw.data(), &x, 8);
            out.insert(out.end(), raw.begin(), raw.end());
            break;
        }
        }
    }
    return out;
}

inline Waveform read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode(bytes, path.string());
}

inline void write(const std::filesystem::path& path, const Waveform& w, SampleFormat format) {
    const auto bytes = encode(w, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace opdkit::wav
