#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace panogan {

enum class Label : uint8_t { normal = 0, abnormal = 1 };

// A square grayscale patch with intensities in [-1, 1] plus provenance.
struct Patch {
    int64_t size = 0;
    std::vector<float> data;  // row-major, size*size
    Label label = Label::normal;
    std::string image_id;
    int64_t x0 = 0, y0 = 0;  // top-left corner in source image coordinates

    bool operator==(const Patch&) const = default;
};

}  // namespace panogan
