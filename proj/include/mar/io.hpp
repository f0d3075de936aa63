#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "mar/geometry.hpp"
#include "mar/image.hpp"

namespace mar::io {

enum class GridKind : std::uint8_t { image = 0, sinogram = 1 };

/// In-memory form of a grid file.
///
/// Byte layout (all little-endian, no padding):
///   0  "MARG"              4 bytes
///   4  version = 1         u16
///   6  kind                u8   (0 image, 1 sinogram)
///   7  rows                u32
///  11  cols                u32
///  15  header slots        4 x f64  (h, C, first angle, angle step; unused = NaN)
///  47  payload             rows * cols x f64, row-major
struct GridFile {
    GridKind kind = GridKind::image;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::array<double, 4> header{};
    std::vector<double> values;

    double spacing() const { return header[0]; }
    double cap() const { return header[1]; }
    double first_angle() const { return header[2]; }
    double angle_step() const { return header[3]; }
};

inline constexpr std::uint16_t kGridVersion = 1;
inline constexpr std::size_t kGridHeaderBytes = 47;

std::vector<std::uint8_t> encode_grid(const GridFile& grid);
GridFile decode_grid(std::span<const std::uint8_t> bytes);

void write_grid(const std::filesystem::path& path, const GridFile& grid);
GridFile read_grid(const std::filesystem::path& path);

GridFile to_grid(const Image& img);
/// Header slots: h, cap (NaN if unknown), first angle, angle step. The angle
/// step is NaN when the angles are not uniformly spaced.
GridFile to_grid(const Sinogram& sino, double spacing = 1.0, double cap = std::numeric_limits<double>::quiet_NaN());
GridFile to_grid(const SaturationMask& mask);

Image image_from_grid(const GridFile& grid);
/// Rebuilds a uniform-angle geometry (unit bin spacing, centered detector).
Sinogram sinogram_from_grid(const GridFile& grid);
/// Entries != 0 are saturated.
SaturationMask mask_from_grid(const GridFile& grid);

/// 8-bit grayscale PNG of a rows x cols grid, mapping [lo, hi] linearly to
/// [0, 255] with clamping and round-half-away-from-zero.
void export_png(const std::filesystem::path& path, std::span<const double> values, std::size_t rows,
                std::size_t cols, double lo, double hi);
void export_png(const std::filesystem::path& path, const GridFile& grid, double lo, double hi);

/// Gray level export_png would write for value.
std::uint8_t window_to_gray(double value, double lo, double hi);

/// Row-major CSV, one grid row per line, "%.17g" per value.
void export_csv(const std::filesystem::path& path, std::span<const double> values, std::size_t rows,
                std::size_t cols);

}  // namespace mar::io
