#include "qfd/gram_io.hpp"

#include "qfd/error.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qfd {

namespace {

constexpr std::array<char, 4> kMagic{'Q', 'K', 'G', 'M'};

template <typename T>
void put_le(std::ostream &out, T value) {
    static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
    std::array<char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream &in, const std::filesystem::path &path) {
    std::array<char, sizeof(T)> bytes{};
    if (!in.read(bytes.data(), bytes.size())) {
        throw SchemaError("truncated gram file " + path.string());
    }
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), res.ptr};
}

void write_gram_csv(const std::filesystem::path &path, const RowMatrix &values, const std::vector<std::string> &row_ids) {
    if (static_cast<Eigen::Index>(row_ids.size()) != values.rows()) {
        throw DimensionError("row id count does not match gram rows");
    }
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot open " + path.string() + " for writing");
    }
    out << "row_id";
    for (const std::string &id : row_ids) {
        out << ',' << id;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << row_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            out << ',' << format_double(values(i, j));
        }
        out << '\n';
    }
}

LabeledMatrix read_gram_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(path.string() + " is empty");
    }
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty() || header.front() != "row_id") {
        throw SchemaError(path.string() + ": header must start with row_id");
    }
    const auto n = static_cast<Eigen::Index>(header.size() - 1);
    LabeledMatrix result{RowMatrix(n, n), std::vector<std::string>(header.begin() + 1, header.end())};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::getline(in, line)) {
            throw SchemaError(path.string() + ": expected " + std::to_string(n) + " rows, got " + std::to_string(i));
        }
        const std::vector<std::string> cells = split_csv_line(line);
        if (static_cast<Eigen::Index>(cells.size()) != n + 1) {
            throw SchemaError(path.string() + ": row " + std::to_string(i + 1) + " has " + std::to_string(cells.size()) + " cells");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            const std::string &cell = cells[static_cast<std::size_t>(j + 1)];
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
                throw SchemaError(path.string() + ": unparsable value '" + cell + "' in row " + std::to_string(i + 1));
            }
            result.values(i, j) = v;
        }
    }
    return result;
}

void write_gram_binary(const std::filesystem::path &path, const RowMatrix &values) {
    if (values.rows() != values.cols()) {
        throw DimensionError("binary gram layout requires a square matrix");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SchemaError("cannot open " + path.string() + " for writing");
    }
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(values.rows()));
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = i; j < values.cols(); ++j) {
            put_le<double>(out, values(i, j));
        }
    }
    if (!out) {
        throw SchemaError("failed writing " + path.string());
    }
}

RowMatrix read_gram_binary(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SchemaError("cannot open " + path.string());
    }
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw SchemaError(path.string() + " is not a QKGM gram file");
    }
    const auto n = static_cast<Eigen::Index>(get_le<std::uint32_t>(in, path));
    RowMatrix values(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            values(i, j) = get_le<double>(in, path);
            values(j, i) = values(i, j);
        }
    }
    return values;
}

}  // namespace qfd
