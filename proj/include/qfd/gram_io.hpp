#pragma once

#include "qfd/kernels.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace qfd {

/// CSV layout: header "row_id,<id_0>,...,<id_{n-1}>", then one line per row
/// "<id_i>,<K_i0>,...". Values use shortest round-trip formatting.
void write_gram_csv(const std::filesystem::path &path, const RowMatrix &values, const std::vector<std::string> &row_ids);

struct LabeledMatrix {
    RowMatrix values;
    std::vector<std::string> row_ids;
};

[[nodiscard]] LabeledMatrix read_gram_csv(const std::filesystem::path &path);

/// Binary cache layout: magic "QKGM", u32 N (little-endian), then the upper
/// triangle including the diagonal in row-major order as little-endian f64.
void write_gram_binary(const std::filesystem::path &path, const RowMatrix &values);

/// Inverse of write_gram_binary; the lower triangle is mirrored.
[[nodiscard]] RowMatrix read_gram_binary(const std::filesystem::path &path);

/// Shortest decimal text that reads back to exactly the same double.
[[nodiscard]] std::string format_double(double value);

}  // namespace qfd
