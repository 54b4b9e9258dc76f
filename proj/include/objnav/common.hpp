#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace objnav {

/// Raised for malformed input, violated preconditions and IO problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Tolerance used when comparing a metric distance against a range threshold.
inline constexpr double kRangeEps = 1e-9;

struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::string to_string(Cell c) {
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

/// Dense row-major 2D array.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, T fill = T{})
      : height_(height), width_(width),
        data_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill) {}

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  bool contains(Cell c) const {
    return c.row >= 0 && c.col >= 0 && c.row < height_ && c.col < width_;
  }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.col);
  }
  Cell cell(std::size_t idx) const {
    return {static_cast<int>(idx / static_cast<std::size_t>(width_)),
            static_cast<int>(idx % static_cast<std::size_t>(width_))};
  }

  T& operator[](Cell c) { return data_[index(c)]; }
  const T& operator[](Cell c) const { return data_[index(c)]; }
  T& at(std::size_t idx) { return data_[idx]; }
  const T& at(std::size_t idx) const { return data_[idx]; }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

/// Euclidean distance between cell centers in meters.
inline double euclidean(Cell a, Cell b, double cell_size) {
  const double dr = a.row - b.row;
  const double dc = a.col - b.col;
  return std::sqrt(dr * dr + dc * dc) * cell_size;
}

inline bool within_range(Cell a, Cell b, double cell_size, double range) {
  return euclidean(a, b, cell_size) <= range + kRangeEps;
}

}  // namespace objnav

template <>
struct std::hash<objnav::Cell> {
  std::size_t operator()(const objnav::Cell& c) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.row)) << 32) |
                                      static_cast<std::uint32_t>(c.col));
  }
};
