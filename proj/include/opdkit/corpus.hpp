#pragma once

// Corpus manifests: one JSON object per line,
//   {"id": "utt01", "speech": "s.wav", "noise": "n.wav", "enhanced": "e.wav"}
// with "enhanced" (and "mixture") optional. Relative paths resolve against
// the manifest's directory.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "opdkit/errors.hpp"
#include "opdkit/wav_io.hpp"
#include "opdkit/waveform.hpp"

namespace opdkit {

struct UtteranceTriplet {
    std::string utterance_id;
    std::filesystem::path speech_path;
    std::filesystem::path noise_path;
    std::optional<std::filesystem::path> enhanced_path;
    std::optional<std::filesystem::path> mixture_path;
};

struct Utterance {
    std::string id;
    Waveform speech;
    Waveform noise;
    std::optional<Waveform> enhanced;
};

inline std::vector<UtteranceTriplet> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    const auto base = path.parent_path();
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    std::vector<UtteranceTriplet> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = path.string() + ":" + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(where + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("speech") || !j.contains("noise")) {
            throw ValidationError(where + ": entry needs \"speech\" and \"noise\"");
        }
        UtteranceTriplet t;
        t.speech_path = resolve(j.at("speech").get<std::string>());
        t.noise_path = resolve(j.at("noise").get<std::string>());
        if (j.contains("enhanced") && !j.at("enhanced").is_null()) t.enhanced_path = resolve(j.at("enhanced").get<std::string>());
        if (j.contains("mixture") && !j.at("mixture").is_null()) t.mixture_path = resolve(j.at("mixture").get<std::string>());
        t.utterance_id = j.contains("id") ? j.at("id").get<std::string>() : t.speech_path.stem().string();
        out.push_back(std::move(t));
    }
    if (out.empty()) throw ValidationError("manifest " + path.string() + " is empty");
    return out;
}

inline nlohmann::json triplet_to_json(const UtteranceTriplet& t, const std::filesystem::path& relative_to) {
    const auto rel = [&](const std::filesystem::path& p) {
        return std::filesystem::absolute(p).lexically_relative(std::filesystem::absolute(relative_to)).generic_string();
    };
    nlohmann::json j{{"id", t.utterance_id}, {"speech", rel(t.speech_path)}, {"noise", rel(t.noise_path)}};
    if (t.mixture_path) j["mixture"] = rel(*t.mixture_path);
    if (t.enhanced_path) j["enhanced"] = rel(*t.enhanced_path);
    return j;
}

inline void write_manifest(const std::filesystem::path& path, const std::vector<UtteranceTriplet>& triplets) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest " + path.string());
    for (const auto& t : triplets) out << triplet_to_json(t, path.parent_path()).dump() << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

/// Reads the files of one triplet and checks that they share length and rate.
inline Utterance load_utterance(const UtteranceTriplet& t) {
    for (const auto* p : {&t.speech_path, &t.noise_path}) {
        if (!std::filesystem::exists(*p)) throw ValidationError("missing file " + p->string());
    }
    if (t.enhanced_path && !std::filesystem::exists(*t.enhanced_path)) {
        throw ValidationError("missing file " + t.enhanced_path->string());
    }
    Utterance u{t.utterance_id, wav::read(t.speech_path), wav::read(t.noise_path), std::nullopt};
    require_same_shape(u.speech, u.noise, ("utterance " + t.utterance_id + " speech/noise").c_str());
    if (t.enhanced_path) {
        u.enhanced = wav::read(*t.enhanced_path);
        require_same_shape(u.speech, *u.enhanced, ("utterance " + t.utterance_id + " speech/enhanced").c_str());
    }
    return u;
}

} // namespace opdkit
