#include "phi4lab/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace phi4lab {

namespace fs = std::filesystem;
using json = nlohmann::json;

uint64_t fnv1a64(const void* data, size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

void write_bytes_atomic(const fs::path& path, const void* data, size_t bytes) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("write failed: " + tmp.string());
        os.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    }
    fs::rename(tmp, path);
}

void write_matrix(const fs::path& path, const double* data, long rows, long cols) {
    const size_t bytes = sizeof(double) * static_cast<size_t>(rows) * cols;
    write_bytes_atomic(path, data, bytes);
    json meta;
    meta["dtype"] = "f64";
    meta["shape"] = {rows, cols};
    meta["order"] = "col";
    meta["checksum"] = hex64(fnv1a64(data, bytes));
    const std::string m = meta.dump(2) + "\n";
    write_bytes_atomic(fs::path(path.string() + ".json"), m.data(), m.size());
}

}  // namespace

void write_array(const fs::path& path, const Mat& m) {
    write_matrix(path, m.data(), m.rows(), m.cols());
}

void write_array(const fs::path& path, const Vec& v) {
    write_matrix(path, v.data(), v.size(), 1);
}

Mat read_array(const fs::path& path) {
    std::ifstream ms(path.string() + ".json");
    if (!ms) throw std::runtime_error("missing sidecar: " + path.string() + ".json");
    json meta = json::parse(ms);
    const long rows = meta["shape"][0], cols = meta["shape"][1];

    Mat m(rows, cols);
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("missing array: " + path.string());
    const size_t bytes = sizeof(double) * static_cast<size_t>(rows) * cols;
    is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(bytes));
    if (is.gcount() != static_cast<std::streamsize>(bytes))
        throw std::runtime_error("truncated array: " + path.string());
    if (meta["checksum"] != hex64(fnv1a64(m.data(), bytes)))
        throw std::runtime_error("checksum mismatch: " + path.string());
    return m;
}

struct CsvWriter::Impl {
    std::ofstream os;
    size_t columns = 0;
};

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : impl_(new Impl) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    impl_->os.open(path, std::ios::trunc);
    if (!impl_->os) throw std::runtime_error("cannot open " + path.string());
    impl_->os.precision(17);
    impl_->columns = header.size();
    for (size_t i = 0; i < header.size(); ++i)
        impl_->os << header[i] << (i + 1 < header.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i)
        impl_->os << values[i] << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<std::string>& values) {
    for (size_t i = 0; i < values.size(); ++i)
        impl_->os << values[i] << (i + 1 < values.size() ? "," : "\n");
}

void write_text(const fs::path& path, const std::string& content) {
    write_bytes_atomic(path, content.data(), content.size());
}

std::string read_text(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("missing file: " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace phi4lab
