#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecgbeat/types.hpp"

namespace ecgbeat {

struct LoadOptions {
    /// Lead to keep; nullopt keeps every lead in the file.
    std::optional<std::size_t> lead = 0;
    /// Unknown label symbols raise instead of being skipped.
    bool strict = false;
    LabelSet labels;
};

struct LoadedRecord {
    EcgRecord record;
    std::size_t skipped_unknown_labels = 0;
};

/// Signal CSV: no header, one row per sample, one or two numeric columns.
/// Annotation CSV: header `sample_index,label`, rows in any order.
LoadedRecord load_record(const std::filesystem::path& signal_path,
                         const std::filesystem::path& annotation_path, double fs,
                         const LoadOptions& options = {});

/// Writes the two CSV files that load_record reads back.
void save_record(const EcgRecord& record, const LabelSet& labels,
                 const std::filesystem::path& signal_path,
                 const std::filesystem::path& annotation_path);

struct LabeledRows {
    Matrix rows;
    std::vector<ClassId> labels;
};

/// CSV with header `f0,...,f{d-1},label`. Values use the shortest decimal
/// form that parses back to the same double, so reload is exact.
void save_feature_matrix(const Matrix& rows, std::span<const ClassId> labels,
                         const std::filesystem::path& path);
LabeledRows load_feature_matrix(const std::filesystem::path& path);

/// Writes `<stem>.f32` (little-endian float32, channel-major GASF, MTF, RP)
/// and `<stem>_gasf.pgm`, `<stem>_mtf.pgm`, `<stem>_rp.pgm` (binary P5,
/// each channel min..max mapped to 0..255; a flat channel maps to 255).
void export_image(const BeatImage& image, const std::filesystem::path& stem);

/// Reads a `.f32` file written by export_image.
BeatImage load_image_f32(const std::filesystem::path& path);

/// The 8-bit PGM payload for one channel, without header.
std::vector<unsigned char> channel_to_gray(const Matrix& channel);

// Number formatting shared by every text writer in the project.
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);

}  // namespace ecgbeat
