#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsed/error.hpp"

namespace wsed {

// A sampled multichannel signal in raw ADC units plus the calibration needed
// to recover physical values: physical_mV = (raw - baseline) / gain.
struct SignalRecord {
    std::string record_id;
    double sampling_rate = 0.0;   // samples per second
    int channel_count = 0;
    std::vector<std::int32_t> samples;  // n x c, sample-major (frame interleaved)
    std::vector<double> gain;           // ADC units per mV, per channel
    std::vector<int> baseline;          // ADC offset, per channel

    // Set when the source omitted calibration and the WFDB default
    // (gain 200 ADC/mV, baseline 0) was applied.
    std::vector<bool> default_gain_applied;
    // Trailing zero samples appended to satisfy format-212 pairing; stripped
    // on read, recorded here on write.
    int pad_samples = 0;

    std::int64_t length() const {
        return channel_count > 0 ? static_cast<std::int64_t>(samples.size()) / channel_count : 0;
    }

    std::int32_t raw(std::int64_t i, int ch) const {
        return samples[static_cast<std::size_t>(i) * channel_count + ch];
    }

    double physical(std::int64_t i, int ch) const {
        return (static_cast<double>(raw(i, ch)) - baseline[ch]) / gain[ch];
    }

    void validate() const {
        if (channel_count <= 0) throw Error("record has no channels");
        if (sampling_rate <= 0.0) throw Error("record has non-positive sampling rate");
        if (samples.empty()) throw Error("record has no samples");
        if (samples.size() % static_cast<std::size_t>(channel_count) != 0)
            throw Error("sample buffer size is not a multiple of the channel count");
        if (gain.size() != static_cast<std::size_t>(channel_count) ||
            baseline.size() != static_cast<std::size_t>(channel_count))
            throw Error("per-channel calibration arrays do not match channel count");
        for (double g : gain)
            if (g <= 0.0) throw Error("non-positive channel gain");
    }
};

// Rhythm regime changes covering [0, n): (onset sample, rhythm label index).
// Onsets are strictly increasing and start at 0.
struct RhythmAnnotation {
    std::vector<std::pair<std::int64_t, int>> change_points;

    int label_at(std::int64_t sample) const {
        if (change_points.empty()) throw Error("empty rhythm annotation");
        int label = change_points.front().second;
        for (const auto& [onset, code] : change_points) {
            if (onset > sample) break;
            label = code;
        }
        return label;
    }

    void validate(std::int64_t n) const {
        if (change_points.empty()) throw Error("empty rhythm annotation");
        if (change_points.front().first != 0) throw Error("first rhythm onset must be 0");
        for (std::size_t i = 1; i < change_points.size(); ++i)
            if (change_points[i].first <= change_points[i - 1].first)
                throw Error("rhythm onsets must be strictly increasing");
        if (n >= 0 && change_points.back().first >= n)
            throw Error("rhythm onset beyond record end");
    }
};

// Beat events: (sample index, beat label index or kExcludedLabel), strictly
// increasing sample positions.
struct BeatAnnotation {
    std::vector<std::pair<std::int64_t, int>> beats;

    void validate(std::int64_t n) const {
        for (std::size_t i = 0; i < beats.size(); ++i) {
            if (beats[i].first < 0 || (n >= 0 && beats[i].first >= n))
                throw Error(msg("beat sample ", beats[i].first, " outside record"));
            if (i > 0 && beats[i].first <= beats[i - 1].first)
                throw Error("beat samples must be strictly increasing");
        }
    }
};

}  // namespace wsed
