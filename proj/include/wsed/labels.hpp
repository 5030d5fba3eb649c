#pragma once

#include <string>
#include <vector>

#include "wsed/error.hpp"

namespace wsed {

enum class Task { rhythm, beat };

// Beats outside the target classes stay in segments but are masked from the
// loss and the metrics. They are labelled with this sentinel.
inline constexpr int kExcludedLabel = -1;

// Ordered class vocabulary for one detection task. Labels are referred to by
// index everywhere; names only appear at the I/O boundary.
struct LabelVocabulary {
    Task task = Task::rhythm;
    std::vector<std::string> names;

    int size() const { return static_cast<int>(names.size()); }

    int index_of(const std::string& name) const {
        for (int i = 0; i < size(); ++i)
            if (names[i] == name) return i;
        return -1;
    }

    const std::string& name_of(int label) const {
        if (label < 0 || label >= size())
            throw Error(msg("label index ", label, " outside vocabulary of size ", size()));
        return names[static_cast<std::size_t>(label)];
    }

    bool operator==(const LabelVocabulary&) const = default;
};

// AF-vs-other rhythm vocabulary (m = 2).
inline LabelVocabulary rhythm_vocabulary() {
    return LabelVocabulary{Task::rhythm, {"AF", "Other"}};
}

// Five-class beat vocabulary: normal, left/right bundle branch block,
// atrial premature, premature ventricular (m = 5).
inline LabelVocabulary beat_vocabulary() {
    return LabelVocabulary{Task::beat, {"N", "L", "R", "A", "V"}};
}

// Vocabulary over caller-chosen class names, for generated datasets.
inline LabelVocabulary custom_vocabulary(Task task, std::vector<std::string> names) {
    if (names.size() < 2) throw Error("vocabulary needs at least 2 classes");
    return LabelVocabulary{task, std::move(names)};
}

}  // namespace wsed
