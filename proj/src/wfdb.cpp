#include "wsed/wfdb.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "wsed/labels.hpp"

namespace wsed::wfdb {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::int32_t sign_extend_12(int v) {
    return (v & 0x800) ? v - 0x1000 : v;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(msg("cannot open '", path.string(), "'"));
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(msg("cannot open '", path.string(), "' for writing"));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(msg("failed writing '", path.string(), "'"));
}

// Annotation codes that never denote beats (rhythm '+' carrier, signal
// quality marks, waveform boundary marks, ...). Everything else in 1..49
// that is not in the beat table is an unknown beat kept as "other".
bool is_non_beat_code(int code) {
    switch (code) {
        case 14:  // ~ signal quality
        case 16:  // | isolated artifact
        case 18:  // s ST change
        case 19:  // T T-wave change
        case 20:  // * systole
        case 21:  // D diastole
        case 22:  // " comment
        case 23:  // = measurement
        case 24:  // p P-wave peak
        case 25:  // B bundle branch block beat group marker
        case 26:  // ^ pacemaker artifact (non-beat)
        case 27:  // t T-wave peak
        case 28:  // + rhythm change carrier
        case 29:  // u U-wave peak
        case 30:  // ? learning
        case 31:  // ! ventricular flutter wave
        case 32:  // [ start VF
        case 33:  // ] end VF
        case 36:  // @ link
        case 37:  // x non-conducted P
        case 39:  // ( waveform onset
        case 40:  // ) waveform end
        case 41:  // r R-on-T (treated as marker here)
            return true;
        default:
            return false;
    }
}

}  // namespace

HeaderInfo parse_header(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    HeaderInfo info;

    // Record line: "name nsig fs [nsamples]".
    do {
        if (!std::getline(in, line)) throw ParseError("header is empty");
        ++line_no;
        line = trim(line);
    } while (line.empty() || line[0] == '#');

    {
        std::istringstream ls(line);
        double fs = 0.0;
        if (!(ls >> info.record_name >> info.signal_count))
            throw ParseError(msg("line ", line_no, ": malformed record line '", line, "'"));
        if (info.signal_count <= 0)
            throw ParseError(msg("line ", line_no, ": invalid header, nsig must be positive, got ",
                                 info.signal_count));
        if (ls >> fs)
            info.sampling_rate = fs;
        else
            info.sampling_rate = 250.0;  // WFDB default sampling frequency
        std::int64_t nsamp = 0;
        if (ls >> nsamp) info.sample_count = nsamp;
    }

    for (int i = 0; i < info.signal_count; ++i) {
        do {
            if (!std::getline(in, line))
                throw ParseError(msg("header ends before signal line ", i + 1, " of ",
                                     info.signal_count));
            ++line_no;
            line = trim(line);
        } while (line.empty() || line[0] == '#');

        std::istringstream ls(line);
        SignalSpec spec;
        std::string fmt_token;
        if (!(ls >> spec.file_name >> fmt_token))
            throw ParseError(msg("line ", line_no, ": malformed signal line '", line, "'"));
        // Format token may carry an "xN" samples-per-frame suffix; only the
        // leading integer is the storage format.
        try {
            spec.storage_format = std::stoi(fmt_token);
        } catch (...) {
            throw ParseError(msg("line ", line_no, ": bad storage format '", fmt_token, "'"));
        }

        std::string adc_token;
        if (ls >> adc_token) {
            // gain[(baseline)][/units]
            std::string head = adc_token;
            auto slash = head.find('/');
            if (slash != std::string::npos) head = head.substr(0, slash);
            auto open = head.find('(');
            if (open != std::string::npos) {
                auto close = head.find(')', open);
                if (close == std::string::npos)
                    throw ParseError(msg("line ", line_no, ": unterminated baseline in '",
                                         adc_token, "'"));
                try {
                    spec.baseline = std::stoi(head.substr(open + 1, close - open - 1));
                } catch (...) {
                    throw ParseError(msg("line ", line_no, ": bad baseline in '", adc_token, "'"));
                }
                head = head.substr(0, open);
            }
            double g = 0.0;
            try {
                g = std::stod(head);
            } catch (...) {
                throw ParseError(msg("line ", line_no, ": bad gain '", adc_token, "'"));
            }
            if (g == 0.0) {
                // WFDB uses gain 0 to mean "uncalibrated"; apply the default.
                spec.gain = 200.0;
                spec.gain_defaulted = true;
            } else if (g < 0.0) {
                throw ParseError(msg("line ", line_no, ": negative gain '", adc_token, "'"));
            } else {
                spec.gain = g;
            }
        } else {
            spec.gain = 200.0;
            spec.gain_defaulted = true;
        }

        // Skip the optional adc-resolution/zero/initial/checksum/blocksize
        // columns; whatever follows them is the free-text description.
        std::string tok;
        int numeric_skipped = 0;
        std::string rest;
        while (ls >> tok) {
            bool numeric = !tok.empty() &&
                           (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '-');
            if (numeric && numeric_skipped < 5) {
                ++numeric_skipped;
                continue;
            }
            rest += (rest.empty() ? "" : " ") + tok;
            while (ls >> tok) rest += " " + tok;
        }
        spec.description = rest;
        info.signals.push_back(std::move(spec));
    }
    return info;
}

std::string write_header(const HeaderInfo& info) {
    std::ostringstream out;
    out << info.record_name << ' ' << info.signal_count << ' ' << info.sampling_rate;
    if (info.sample_count > 0) out << ' ' << info.sample_count;
    out << '\n';
    for (const auto& s : info.signals) {
        out << s.file_name << ' ' << s.storage_format << ' ' << s.gain;
        if (s.baseline != 0) out << '(' << s.baseline << ')';
        out << "/mV 12 0 0 0 0";
        if (!s.description.empty()) out << ' ' << s.description;
        out << '\n';
    }
    return out.str();
}

std::vector<std::int32_t> decode_format212(const std::vector<std::uint8_t>& bytes,
                                           std::int64_t sample_count, int channel_count) {
    if (channel_count <= 0) throw DecodeError("channel count must be positive");
    if (sample_count < 0) throw DecodeError("negative sample count");
    const std::int64_t total = sample_count * channel_count;
    const std::int64_t needed = (total * 3 + 1) / 2;  // ceil(total * 1.5)
    if (static_cast<std::int64_t>(bytes.size()) < needed)
        throw DecodeError(msg("format-212 stream truncated: need ", needed, " bytes, have ",
                              bytes.size(), " (at byte offset ", bytes.size(), ")"));

    std::vector<std::int32_t> flat;
    flat.reserve(static_cast<std::size_t>(total));
    std::size_t byte_pos = 0;
    while (static_cast<std::int64_t>(flat.size()) < total) {
        const std::uint8_t b0 = bytes[byte_pos];
        const std::uint8_t b1 = bytes[byte_pos + 1];
        const std::uint8_t b2 = bytes[byte_pos + 2];
        byte_pos += 3;
        flat.push_back(sign_extend_12(b0 | ((b1 & 0x0F) << 8)));
        if (static_cast<std::int64_t>(flat.size()) < total)
            flat.push_back(sign_extend_12(b2 | ((b1 & 0xF0) << 4)));
    }
    return flat;
}

std::vector<std::uint8_t> encode_format212(const std::vector<std::int32_t>& samples) {
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i] < -2048 || samples[i] > 2047)
            throw Error(msg("sample ", samples[i], " at index ", i,
                            " outside the 12-bit range [-2048, 2047]"));

    std::vector<std::int32_t> padded = samples;
    if (padded.size() % 2 != 0) padded.push_back(0);

    std::vector<std::uint8_t> bytes;
    bytes.reserve(padded.size() / 2 * 3);
    for (std::size_t i = 0; i < padded.size(); i += 2) {
        const std::uint32_t s1 = static_cast<std::uint32_t>(padded[i]) & 0xFFF;
        const std::uint32_t s2 = static_cast<std::uint32_t>(padded[i + 1]) & 0xFFF;
        bytes.push_back(static_cast<std::uint8_t>(s1 & 0xFF));
        bytes.push_back(static_cast<std::uint8_t>(((s1 >> 8) & 0x0F) | (((s2 >> 8) & 0x0F) << 4)));
        bytes.push_back(static_cast<std::uint8_t>(s2 & 0xFF));
    }
    return bytes;
}

AnnotationTables default_annotation_tables() {
    AnnotationTables t;
    t.beat_code_to_label = {{1, 0}, {2, 1}, {3, 2}, {8, 3}, {5, 4}};  // N L R A V
    t.rhythm_string_to_label = {{"(AFIB", 0}};
    t.default_rhythm_label = 1;  // Other
    return t;
}

DecodedAnnotations decode_annotations(const std::vector<std::uint8_t>& bytes,
                                      const AnnotationTables& tables) {
    DecodedAnnotations out;
    std::int64_t current_sample = 0;
    std::size_t pos = 0;
    bool terminated = false;

    auto need = [&](std::size_t count) {
        if (pos + count > bytes.size())
            throw DecodeError(msg("annotation stream truncated at byte ", pos));
    };

    while (true) {
        need(2);
        const int word = bytes[pos] | (bytes[pos + 1] << 8);
        pos += 2;
        const int code = (word >> 10) & 0x3F;
        const int increment = word & 0x3FF;

        if (code == 0 && increment == 0) {
            terminated = true;
            break;
        }

        if (code == 59) {  // SKIP: 32-bit interval, high 16 bits first
            need(4);
            const std::uint32_t high = bytes[pos] | (bytes[pos + 1] << 8);
            const std::uint32_t low = bytes[pos + 2] | (bytes[pos + 3] << 8);
            pos += 4;
            current_sample += static_cast<std::int32_t>((high << 16) | low);
            continue;
        }
        if (code >= 60 && code <= 62) continue;  // NUM/SUB/CHN modifiers
        if (code == 63) {                        // AUX string, padded to even length
            const int len = increment;
            need(static_cast<std::size_t>(len + (len % 2)));
            std::string aux(reinterpret_cast<const char*>(&bytes[pos]),
                            static_cast<std::size_t>(len));
            pos += static_cast<std::size_t>(len + (len % 2));
            while (!aux.empty() && aux.back() == '\0') aux.pop_back();
            if (!aux.empty() && aux.front() == '(') {
                auto it = tables.rhythm_string_to_label.find(aux);
                const int label = it != tables.rhythm_string_to_label.end()
                                      ? it->second
                                      : tables.default_rhythm_label;
                out.rhythms.change_points.emplace_back(current_sample, label);
            }
            continue;
        }

        current_sample += increment;
        if (is_non_beat_code(code)) continue;

        auto it = tables.beat_code_to_label.find(code);
        int label = kExcludedLabel;
        if (it != tables.beat_code_to_label.end()) {
            label = it->second;
        } else {
            ++out.unknown_beat_count;
        }
        if (!out.beats.beats.empty() && current_sample <= out.beats.beats.back().first)
            throw DecodeError(msg("beat sample ", current_sample,
                                  " not after previous beat at ",
                                  out.beats.beats.back().first));
        out.beats.beats.emplace_back(current_sample, label);
    }

    if (!terminated) throw DecodeError("annotation stream missing terminator");
    return out;
}

std::vector<std::uint8_t> encode_annotations(const BeatAnnotation& beats,
                                             const RhythmAnnotation& rhythms,
                                             const AnnotationTables& tables) {
    // Reverse lookup label -> code; excluded beats use 13 ('Q', unclassifiable).
    std::map<int, int> label_to_code;
    for (const auto& [code, label] : tables.beat_code_to_label) label_to_code[label] = code;
    std::map<int, std::string> label_to_rhythm;
    for (const auto& [s, label] : tables.rhythm_string_to_label) label_to_rhythm[label] = s;

    struct Event {
        std::int64_t sample;
        bool is_rhythm;
        int label;
    };
    std::vector<Event> events;
    for (const auto& [sample, label] : beats.beats) events.push_back({sample, false, label});
    for (const auto& [sample, label] : rhythms.change_points)
        events.push_back({sample, true, label});
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.sample < b.sample; });

    std::vector<std::uint8_t> bytes;
    auto push_word = [&](int code, int increment) {
        const int word = ((code & 0x3F) << 10) | (increment & 0x3FF);
        bytes.push_back(static_cast<std::uint8_t>(word & 0xFF));
        bytes.push_back(static_cast<std::uint8_t>((word >> 8) & 0xFF));
    };

    std::int64_t prev = 0;
    for (const auto& ev : events) {
        std::int64_t delta = ev.sample - prev;
        if (delta < 0) throw Error("annotation events out of order");
        if (delta > 1023) {
            push_word(59, 0);
            const std::uint32_t v = static_cast<std::uint32_t>(delta);
            bytes.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
            bytes.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
            bytes.push_back(static_cast<std::uint8_t>(v & 0xFF));
            bytes.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
            delta = 0;
        }
        if (ev.is_rhythm) {
            push_word(28, static_cast<int>(delta));  // '+' rhythm change carrier
            auto it = label_to_rhythm.find(ev.label);
            std::string aux = it != label_to_rhythm.end() ? it->second : "(N";
            push_word(63, static_cast<int>(aux.size()));
            for (char ch : aux) bytes.push_back(static_cast<std::uint8_t>(ch));
            if (aux.size() % 2 != 0) bytes.push_back(0);
        } else {
            auto it = label_to_code.find(ev.label);
            const int code = it != label_to_code.end() ? it->second : 13;
            push_word(code, static_cast<int>(delta));
        }
        prev = ev.sample;
    }
    push_word(0, 0);
    return bytes;
}

SignalRecord read_record(const std::filesystem::path& stem) {
    auto hea_path = stem;
    hea_path += ".hea";
    std::ifstream hea(hea_path);
    if (!hea) throw IoError(msg("cannot open '", hea_path.string(), "'"));
    std::stringstream buf;
    buf << hea.rdbuf();
    HeaderInfo info = parse_header(buf.str());

    for (const auto& s : info.signals)
        if (s.storage_format != 212)
            throw Error(msg("unsupported WFDB storage format ", s.storage_format,
                            " (only format 212 is implemented)"));
    for (std::size_t i = 1; i < info.signals.size(); ++i)
        if (info.signals[i].file_name != info.signals[0].file_name)
            throw Error("multi-file records are not supported");

    auto dat_path = stem.parent_path() / info.signals.at(0).file_name;
    const auto bytes = read_file_bytes(dat_path);

    std::int64_t sample_count = info.sample_count;
    if (sample_count <= 0) {
        const std::int64_t total = static_cast<std::int64_t>(bytes.size()) * 2 / 3;
        sample_count = total / info.signal_count;
    }

    SignalRecord rec;
    rec.record_id = info.record_name;
    rec.sampling_rate = info.sampling_rate;
    rec.channel_count = info.signal_count;
    rec.samples = decode_format212(bytes, sample_count, info.signal_count);
    for (const auto& s : info.signals) {
        rec.gain.push_back(s.gain);
        rec.baseline.push_back(s.baseline);
        rec.default_gain_applied.push_back(s.gain_defaulted);
    }
    rec.validate();
    return rec;
}

std::optional<DecodedAnnotations> read_annotations_file(const std::filesystem::path& atr_path,
                                                        const AnnotationTables& tables) {
    if (!std::filesystem::exists(atr_path)) return std::nullopt;
    return decode_annotations(read_file_bytes(atr_path), tables);
}

void write_record(const std::filesystem::path& stem, const SignalRecord& record) {
    record.validate();
    HeaderInfo info;
    info.record_name = record.record_id;
    info.signal_count = record.channel_count;
    info.sampling_rate = record.sampling_rate;
    info.sample_count = record.length();
    for (int ch = 0; ch < record.channel_count; ++ch) {
        SignalSpec spec;
        spec.file_name = stem.filename().string() + ".dat";
        spec.storage_format = 212;
        spec.gain = record.gain[ch];
        spec.baseline = record.baseline[ch];
        info.signals.push_back(std::move(spec));
    }

    auto hea_path = stem;
    hea_path += ".hea";
    std::ofstream hea(hea_path);
    if (!hea) throw IoError(msg("cannot open '", hea_path.string(), "' for writing"));
    hea << write_header(info);

    auto dat_path = stem;
    dat_path += ".dat";
    write_file_bytes(dat_path, encode_format212(record.samples));
}

void write_annotations_file(const std::filesystem::path& atr_path, const BeatAnnotation& beats,
                            const RhythmAnnotation& rhythms, const AnnotationTables& tables) {
    write_file_bytes(atr_path, encode_annotations(beats, rhythms, tables));
}

}  // namespace wsed::wfdb
