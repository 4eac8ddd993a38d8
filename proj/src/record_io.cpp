#include "ecgbeat/record_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ecgbeat/errors.hpp"

namespace ecgbeat {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

LabelSet::LabelSet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw ValidationError("label set must not be empty");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (symbols_[i].empty()) throw ValidationError("label symbols must be non-empty");
        for (std::size_t j = 0; j < i; ++j)
            if (symbols_[i] == symbols_[j])
                throw ValidationError("duplicate label symbol '" + symbols_[i] + "'");
    }
}

std::optional<ClassId> LabelSet::find(const std::string& symbol) const {
    const auto it = std::find(symbols_.begin(), symbols_.end(), symbol);
    if (it == symbols_.end()) return std::nullopt;
    return static_cast<ClassId>(it - symbols_.begin());
}

void EcgRecord::validate() const {
    if (leads.empty() || leads.size() > 2)
        throw ValidationError("record must have 1 or 2 leads, got " + std::to_string(leads.size()));
    if (!(fs > 0.0) || !std::isfinite(fs)) throw ValidationError("sampling rate must be positive");
    const std::size_t n = leads.front().size();
    for (const auto& lead : leads)
        if (lead.size() != n) throw ValidationError("leads have different lengths");
    if (labels.size() != rpeaks.size())
        throw ValidationError("label count does not match R-peak count");
    for (std::size_t i = 0; i < rpeaks.size(); ++i) {
        if (rpeaks[i] >= n)
            throw ValidationError("R-peak " + std::to_string(rpeaks[i]) + " beyond signal length " +
                                  std::to_string(n));
        if (i > 0 && rpeaks[i] <= rpeaks[i - 1])
            throw ValidationError("R-peaks not strictly increasing at index " + std::to_string(i));
    }
}

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), res.ptr};
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
        return std::nullopt;
    return value;
}

LoadedRecord load_record(const std::filesystem::path& signal_path,
                         const std::filesystem::path& annotation_path, double fs,
                         const LoadOptions& options) {
    if (!(fs > 0.0)) throw ValidationError("sampling rate must be positive");

    LoadedRecord result;
    EcgRecord& rec = result.record;
    rec.fs = fs;

    {
        auto in = open_input(signal_path);
        std::string line;
        std::size_t line_no = 0;
        std::size_t n_cols = 0;
        std::vector<std::vector<double>> cols;
        while (std::getline(in, line)) {
            ++line_no;
            if (blank(line)) continue;
            const auto fields = split_csv(line);
            if (n_cols == 0) {
                if (fields.size() > 2)
                    throw ParseError(signal_path.string(), line_no, "expected 1 or 2 columns");
                n_cols = fields.size();
                cols.resize(n_cols);
            } else if (fields.size() != n_cols) {
                throw ParseError(signal_path.string(), line_no,
                                 "expected " + std::to_string(n_cols) + " columns");
            }
            for (std::size_t c = 0; c < n_cols; ++c) {
                const auto v = parse_double(fields[c]);
                if (!v || !std::isfinite(*v))
                    throw ParseError(signal_path.string(), line_no,
                                     "not a finite number: '" + std::string(fields[c]) + "'");
                cols[c].push_back(*v);
            }
        }
        if (n_cols == 0) throw ParseError(signal_path.string(), line_no, "signal file is empty");
        if (options.lead) {
            if (*options.lead >= n_cols)
                throw ValidationError("lead " + std::to_string(*options.lead) + " not present (file has " +
                                      std::to_string(n_cols) + ")");
            rec.leads.push_back(std::move(cols[*options.lead]));
        } else {
            rec.leads = std::move(cols);
        }
    }

    std::vector<std::pair<std::size_t, ClassId>> beats;
    {
        auto in = open_input(annotation_path);
        std::string line;
        std::size_t line_no = 0;
        bool header_seen = false;
        while (std::getline(in, line)) {
            ++line_no;
            if (blank(line)) continue;
            const auto fields = split_csv(line);
            if (!header_seen) {
                if (fields.size() != 2 || fields[0] != "sample_index" || fields[1] != "label")
                    throw ParseError(annotation_path.string(), line_no,
                                     "expected header 'sample_index,label'");
                header_seen = true;
                continue;
            }
            if (fields.size() != 2)
                throw ParseError(annotation_path.string(), line_no, "expected 2 columns");
            std::size_t index = 0;
            const auto f = fields[0];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), index);
            if (res.ec != std::errc{} || res.ptr != f.data() + f.size() || f.empty())
                throw ParseError(annotation_path.string(), line_no,
                                 "bad sample index '" + std::string(f) + "'");
            std::string symbol(fields[1]);
            if (symbol.size() >= 2 && symbol.front() == '"' && symbol.back() == '"')
                symbol = symbol.substr(1, symbol.size() - 2);
            const auto id = options.labels.find(symbol);
            if (!id) {
                if (options.strict)
                    throw ValidationError(annotation_path.string() + ":" + std::to_string(line_no) +
                                          ": unknown label '" + symbol + "'");
                ++result.skipped_unknown_labels;
                continue;
            }
            beats.emplace_back(index, *id);
        }
        if (!header_seen)
            throw ParseError(annotation_path.string(), line_no, "missing header 'sample_index,label'");
    }

    std::stable_sort(beats.begin(), beats.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [index, id] : beats) {
        rec.rpeaks.push_back(index);
        rec.labels.push_back(id);
    }
    rec.validate();
    return result;
}

void save_record(const EcgRecord& record, const LabelSet& labels,
                 const std::filesystem::path& signal_path,
                 const std::filesystem::path& annotation_path) {
    record.validate();
    {
        auto out = open_output(signal_path);
        const std::size_t n = record.length();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < record.leads.size(); ++c) {
                if (c) out << ',';
                out << format_double(record.leads[c][i]);
            }
            out << '\n';
        }
    }
    auto out = open_output(annotation_path);
    out << "sample_index,label\n";
    for (std::size_t i = 0; i < record.rpeaks.size(); ++i)
        out << record.rpeaks[i] << ',' << labels.symbol(record.labels[i]) << '\n';
}

void save_feature_matrix(const Matrix& rows, std::span<const ClassId> labels,
                         const std::filesystem::path& path) {
    if (rows.rows() != labels.size())
        throw ValidationError("feature matrix has " + std::to_string(rows.rows()) + " rows but " +
                              std::to_string(labels.size()) + " labels");
    if (rows.cols() == 0) throw ValidationError("feature matrix has zero columns");
    for (double v : rows.data())
        if (!std::isfinite(v)) throw ValidationError("feature matrix contains a non-finite value");

    auto out = open_output(path);
    for (std::size_t c = 0; c < rows.cols(); ++c) out << 'f' << c << ',';
    out << "label\n";
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        for (double v : rows.row(r)) out << format_double(v) << ',';
        out << labels[r] << '\n';
    }
}

LabeledRows load_feature_matrix(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    std::vector<double> values;
    LabeledRows result;

    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto fields = split_csv(line);
        if (dim == 0) {
            if (fields.size() < 2 || fields.back() != "label")
                throw ParseError(path.string(), line_no, "expected header 'f0,...,label'");
            dim = fields.size() - 1;
            for (std::size_t c = 0; c < dim; ++c)
                if (fields[c] != "f" + std::to_string(c))
                    throw ParseError(path.string(), line_no,
                                     "expected column 'f" + std::to_string(c) + "'");
            continue;
        }
        if (fields.size() != dim + 1)
            throw ParseError(path.string(), line_no,
                             "expected " + std::to_string(dim + 1) + " columns, got " +
                                 std::to_string(fields.size()));
        for (std::size_t c = 0; c < dim; ++c) {
            const auto v = parse_double(fields[c]);
            if (!v || !std::isfinite(*v))
                throw ParseError(path.string(), line_no, "not a finite number in column f" + std::to_string(c));
            values.push_back(*v);
        }
        int label = 0;
        const auto f = fields[dim];
        const auto res = std::from_chars(f.data(), f.data() + f.size(), label);
        if (res.ec != std::errc{} || res.ptr != f.data() + f.size() || label < 0)
            throw ParseError(path.string(), line_no, "bad label '" + std::string(f) + "'");
        result.labels.push_back(label);
    }
    if (dim == 0) throw ParseError(path.string(), line_no, "missing header");

    result.rows = Matrix(result.labels.size(), dim);
    result.rows.data() = std::move(values);
    return result;
}

namespace {

void check_channel(const Matrix& m, const char* name, double lo, double hi) {
    if (m.rows() != kImageSide || m.cols() != kImageSide)
        throw ValidationError(std::string(name) + " channel must be " + std::to_string(kImageSide) + "x" +
                              std::to_string(kImageSide));
    constexpr double tol = 1e-9;
    for (double v : m.data())
        if (!std::isfinite(v) || v < lo - tol || v > hi + tol)
            throw ValidationError(std::string(name) + " channel value out of range");
}

void write_pgm(const Matrix& channel, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "P5\n" << channel.cols() << ' ' << channel.rows() << "\n255\n";
    const auto gray = channel_to_gray(channel);
    out.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix) {
    return stem.parent_path() / (stem.filename().string() + suffix);
}

}  // namespace

std::vector<unsigned char> channel_to_gray(const Matrix& channel) {
    const auto [lo_it, hi_it] = std::minmax_element(channel.data().begin(), channel.data().end());
    std::vector<unsigned char> gray(channel.data().size(), 255);
    if (channel.data().empty() || *lo_it == *hi_it) return gray;
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = static_cast<unsigned char>(std::lround((channel.data()[i] - lo) / span * 255.0));
    return gray;
}

void export_image(const BeatImage& image, const std::filesystem::path& stem) {
    check_channel(image.gasf, "gasf", -1.0, 1.0);
    check_channel(image.mtf, "mtf", 0.0, 1.0);
    check_channel(image.rp, "rp", 0.0, 1.0);

    std::vector<unsigned char> bytes;
    bytes.reserve(3 * kImageSide * kImageSide * 4);
    for (const Matrix* ch : {&image.gasf, &image.mtf, &image.rp}) {
        for (double v : ch->data()) {
            const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
            for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<unsigned char>(bits >> (8 * b)));
        }
    }
    {
        auto out = open_output(with_suffix(stem, ".f32"));
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for " + with_suffix(stem, ".f32").string());
    }
    write_pgm(image.gasf, with_suffix(stem, "_gasf.pgm"));
    write_pgm(image.mtf, with_suffix(stem, "_mtf.pgm"));
    write_pgm(image.rp, with_suffix(stem, "_rp.pgm"));
}

BeatImage load_image_f32(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    constexpr std::size_t per_channel = kImageSide * kImageSide;
    if (bytes.size() != 3 * per_channel * 4)
        throw ValidationError(path.string() + ": expected " + std::to_string(3 * per_channel * 4) +
                              " bytes, got " + std::to_string(bytes.size()));
    BeatImage image{Matrix(kImageSide, kImageSide), Matrix(kImageSide, kImageSide),
                    Matrix(kImageSide, kImageSide)};
    std::size_t offset = 0;
    for (Matrix* ch : {&image.gasf, &image.mtf, &image.rp}) {
        for (double& v : ch->data()) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b)
                bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset++])) << (8 * b);
            v = static_cast<double>(std::bit_cast<float>(bits));
        }
    }
    return image;
}

}  // namespace ecgbeat
