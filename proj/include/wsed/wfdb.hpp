#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsed/signal.hpp"

namespace wsed::wfdb {

// Parsed contents of a WFDB header (.hea) document.
struct SignalSpec {
    std::string file_name;
    int storage_format = 212;
    double gain = 200.0;   // ADC units per mV
    int baseline = 0;
    bool gain_defaulted = false;  // header omitted the gain field
    std::string description;
};

struct HeaderInfo {
    std::string record_name;
    int signal_count = 0;
    double sampling_rate = 0.0;
    std::int64_t sample_count = 0;  // 0 when the header omits it
    std::vector<SignalSpec> signals;
};

// First line: "name nsig fs [nsamples]"; one line per signal:
// "file format gain[(baseline)][/units] ...". Unknown storage formats are
// kept in the metadata; decoding them is what fails.
HeaderInfo parse_header(const std::string& text);

std::string write_header(const HeaderInfo& info);

// Format 212 packs two 12-bit two's-complement samples into three bytes:
//   s1 = b0 | ((b1 & 0x0F) << 8),  s2 = b2 | ((b1 & 0xF0) << 4).
// Samples are frame-interleaved across channels. total = sample_count * c.
std::vector<std::int32_t> decode_format212(const std::vector<std::uint8_t>& bytes,
                                           std::int64_t sample_count, int channel_count);

// Inverse of decode_format212. Odd totals are padded with one zero sample;
// the caller records the pad so reads can strip it.
std::vector<std::uint8_t> encode_format212(const std::vector<std::int32_t>& samples);

// MIT annotation stream: 2-byte LE words, high 6 bits = code, low 10 bits =
// time increment. Code 59 (SKIP) is followed by a 32-bit interval (high word
// first); 60-62 are NUM/SUB/CHN modifiers; 63 (AUX) is followed by a padded
// string whose rhythm changes begin with '('. Word 0x0000 terminates.
struct AnnotationTables {
    // MIT beat code -> target beat-class index; unmapped beat codes become
    // kExcludedLabel ("other") and are counted, not dropped.
    std::map<int, int> beat_code_to_label;
    // Rhythm aux string (e.g. "(AFIB") -> rhythm label; anything else maps
    // to default_rhythm_label.
    std::map<std::string, int> rhythm_string_to_label;
    int default_rhythm_label = 1;
};

// Defaults for the MITDB/AFDB conventions: beats {N,L,R,A,V} at codes
// {1,2,3,8,5}; "(AFIB" -> AF, every other rhythm string -> Other.
AnnotationTables default_annotation_tables();

struct DecodedAnnotations {
    BeatAnnotation beats;
    RhythmAnnotation rhythms;          // empty change_points when none seen
    int unknown_beat_count = 0;        // beats retained as "other"
};

DecodedAnnotations decode_annotations(const std::vector<std::uint8_t>& bytes,
                                      const AnnotationTables& tables = default_annotation_tables());

// Writer counterpart used by the synthetic store and by test fixtures.
// Beat labels index the same table as the reader; kExcludedLabel entries are
// written with the unmapped code 13 ('Q'). Rhythm changes ride on a '+'
// annotation followed by an AUX string.
std::vector<std::uint8_t> encode_annotations(const BeatAnnotation& beats,
                                             const RhythmAnnotation& rhythms,
                                             const AnnotationTables& tables = default_annotation_tables());

// Whole-record convenience wrappers over the codecs above. `stem` is the
// path without extension; reads .hea + .dat (+ .atr when present).
SignalRecord read_record(const std::filesystem::path& stem);
std::optional<DecodedAnnotations> read_annotations_file(const std::filesystem::path& atr_path,
                                                        const AnnotationTables& tables = default_annotation_tables());
void write_record(const std::filesystem::path& stem, const SignalRecord& record);
void write_annotations_file(const std::filesystem::path& atr_path, const BeatAnnotation& beats,
                            const RhythmAnnotation& rhythms,
                            const AnnotationTables& tables = default_annotation_tables());

}  // namespace wsed::wfdb
