#include "mar/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <numbers>

#include "mar/error.hpp"

namespace mar::io {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'M', 'A', 'R', 'G'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    using U = std::make_unsigned_t<T>;
    const auto bits = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double value) { put_le(out, std::bit_cast<std::uint64_t>(value)); }

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(bytes[offset + i]) << (8 * i));
    return value;
}

double get_f64(std::span<const std::uint8_t> bytes, std::size_t offset) {
    return std::bit_cast<double>(get_le<std::uint64_t>(bytes, offset));
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<std::uint8_t> encode_grid(const GridFile& grid) {
    const std::size_t count = static_cast<std::size_t>(grid.rows) * grid.cols;
    if (grid.values.size() != count) {
        throw InvalidArgument("encode_grid: payload has " + std::to_string(grid.values.size()) + " values, header says " +
                              std::to_string(count));
    }
    std::vector<std::uint8_t> out;
    out.reserve(kGridHeaderBytes + 8 * count);
    for (auto b : kMagic) out.push_back(b);
    put_le<std::uint16_t>(out, kGridVersion);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(grid.kind));
    put_le<std::uint32_t>(out, grid.rows);
    put_le<std::uint32_t>(out, grid.cols);
    for (double slot : grid.header) put_f64(out, slot);
    for (double v : grid.values) put_f64(out, v);
    return out;
}

GridFile decode_grid(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kGridHeaderBytes) {
        throw FormatError("grid header truncated: expected " + std::to_string(kGridHeaderBytes) + " bytes, got " +
                              std::to_string(bytes.size()),
                          bytes.size());
    }
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw FormatError("bad magic, expected \"MARG\"", 0);
    const auto version = get_le<std::uint16_t>(bytes, 4);
    if (version != kGridVersion) {
        throw FormatError("unsupported grid version " + std::to_string(version), 4);
    }
    const auto kind = bytes[6];
    if (kind > 1) throw FormatError("unknown grid kind " + std::to_string(kind), 6);

    GridFile grid;
    grid.kind = static_cast<GridKind>(kind);
    grid.rows = get_le<std::uint32_t>(bytes, 7);
    grid.cols = get_le<std::uint32_t>(bytes, 11);
    for (std::size_t i = 0; i < 4; ++i) grid.header[i] = get_f64(bytes, 15 + 8 * i);

    const std::uint64_t count = static_cast<std::uint64_t>(grid.rows) * grid.cols;
    const std::uint64_t expected = kGridHeaderBytes + 8 * count;
    if (bytes.size() != expected) {
        throw FormatError("grid payload length mismatch: expected " + std::to_string(expected) + " bytes, got " +
                              std::to_string(bytes.size()),
                          std::min<std::uint64_t>(bytes.size(), expected));
    }
    grid.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) grid.values[i] = get_f64(bytes, kGridHeaderBytes + 8 * i);
    return grid;
}

void write_grid(const std::filesystem::path& path, const GridFile& grid) {
    const auto bytes = encode_grid(grid);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

GridFile read_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_grid(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what(), e.offset());
    }
}

GridFile to_grid(const Image& img) {
    GridFile grid;
    grid.kind = GridKind::image;
    grid.rows = static_cast<std::uint32_t>(img.height());
    grid.cols = static_cast<std::uint32_t>(img.width());
    grid.header = {img.spacing(), kNaN, kNaN, kNaN};
    grid.values.assign(img.values().begin(), img.values().end());
    return grid;
}

GridFile to_grid(const Sinogram& sino, double spacing, double cap) {
    const auto& angles = sino.geometry().angles;
    GridFile grid;
    grid.kind = GridKind::sinogram;
    grid.rows = static_cast<std::uint32_t>(sino.rows());
    grid.cols = static_cast<std::uint32_t>(sino.cols());
    double step = angles.size() > 1 ? std::numbers::pi / static_cast<double>(angles.size()) : std::numbers::pi;
    for (std::size_t k = 0; k < angles.size(); ++k) {
        if (std::abs(angles[k] - (angles[0] + step * static_cast<double>(k))) > 1e-12) {
            step = kNaN;
            break;
        }
    }
    grid.header = {spacing, cap, angles.front(), step};
    grid.values.assign(sino.values().begin(), sino.values().end());
    return grid;
}

GridFile to_grid(const SaturationMask& mask) {
    GridFile grid;
    grid.kind = GridKind::sinogram;
    grid.rows = static_cast<std::uint32_t>(mask.rows);
    grid.cols = static_cast<std::uint32_t>(mask.cols);
    grid.header = {kNaN, kNaN, kNaN, kNaN};
    grid.values.reserve(mask.flags.size());
    for (auto f : mask.flags) grid.values.push_back(f ? 1.0 : 0.0);
    return grid;
}

Image image_from_grid(const GridFile& grid) {
    if (grid.kind != GridKind::image) throw InvalidArgument("expected an image grid, found a sinogram");
    const double h = std::isnan(grid.spacing()) ? 1.0 : grid.spacing();
    return Image(grid.cols, grid.rows, h, grid.values);
}

Sinogram sinogram_from_grid(const GridFile& grid) {
    if (grid.kind != GridKind::sinogram) throw InvalidArgument("expected a sinogram grid, found an image");
    Geometry geom = Geometry::uniform(grid.rows, grid.cols);
    const double uniform_step = std::numbers::pi / static_cast<double>(grid.rows);
    const bool is_uniform = grid.first_angle() == 0.0 && std::abs(grid.angle_step() - uniform_step) < 1e-15;
    if (!is_uniform && !std::isnan(grid.first_angle()) && !std::isnan(grid.angle_step())) {
        for (std::size_t k = 0; k < geom.angles.size(); ++k) {
            geom.angles[k] = grid.first_angle() + grid.angle_step() * static_cast<double>(k);
        }
    }
    geom.validate();
    return Sinogram(std::move(geom), grid.values);
}

SaturationMask mask_from_grid(const GridFile& grid) {
    SaturationMask mask(grid.rows, grid.cols);
    for (std::size_t i = 0; i < grid.values.size(); ++i) mask.flags[i] = grid.values[i] != 0.0 ? 1 : 0;
    return mask;
}

std::uint8_t window_to_gray(double value, double lo, double hi) {
    if (std::isnan(value)) return 0;
    const double t = std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * t));
}

void export_png(const std::filesystem::path& path, std::span<const double> values, std::size_t rows,
                std::size_t cols, double lo, double hi) {
    if (!(lo < hi)) throw InvalidArgument("export_png: window requires lo < hi");
    if (values.size() != rows * cols) throw InvalidArgument("export_png: value count does not match shape");

    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialization failed");
    }
    std::vector<std::uint8_t> pixels(values.size());
    std::transform(values.begin(), values.end(), pixels.begin(), [&](double v) { return window_to_gray(v, lo, hi); });
    std::vector<png_bytep> row_ptrs(rows);
    for (std::size_t r = 0; r < rows; ++r) row_ptrs[r] = pixels.data() + r * cols;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed writing PNG " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void export_png(const std::filesystem::path& path, const GridFile& grid, double lo, double hi) {
    export_png(path, grid.values, grid.rows, grid.cols, lo, hi);
}

void export_csv(const std::filesystem::path& path, std::span<const double> values, std::size_t rows,
                std::size_t cols) {
    if (values.size() != rows * cols) throw InvalidArgument("export_csv: value count does not match shape");
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "w"), &std::fclose);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            std::fprintf(file.get(), c + 1 < cols ? "%.17g," : "%.17g\n", values[r * cols + c]);
        }
    }
    if (std::ferror(file.get())) throw IoError("failed writing " + path.string());
}

}  // namespace mar::io
