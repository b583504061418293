// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsiplab/error.hpp"
#include "gsiplab/interval.hpp"

namespace gsiplab {

/// Values of a box's coordinates, in the box's declared order.
using Point = std::vector<double>;

/// Name -> value binding used for point evaluation of expressions.
using Assignment = std::map<std::string, double, std::less<>>;

struct Coordinate {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

/// Axis-aligned box with named coordinates. Bounds are finite with lo <= hi
/// and names are unique; both are checked on construction.
class BoxDomain {
 public:
  BoxDomain() = default;

  explicit BoxDomain(std::vector<Coordinate> coordinates) : coords_(std::move(coordinates)) {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      const Coordinate& c = coords_[i];
      if (!std::isfinite(c.lo) || !std::isfinite(c.hi))
        throw StructuralError("coordinate '" + c.name + "' has a non-finite bound");
      if (c.lo > c.hi) throw StructuralError("coordinate '" + c.name + "' has lo > hi");
      for (std::size_t j = 0; j < i; ++j) {
        if (coords_[j].name == c.name) throw StructuralError("duplicate coordinate '" + c.name + "'");
      }
    }
  }

  std::size_t size() const noexcept { return coords_.size(); }
  bool empty() const noexcept { return coords_.empty(); }
  const Coordinate& operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<Coordinate>& coordinates() const noexcept { return coords_; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(coords_.size());
    for (const auto& c : coords_) out.push_back(c.name);
    return out;
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::vector<Interval> intervals() const {
    std::vector<Interval> out;
    out.reserve(coords_.size());
    for (const auto& c : coords_) out.emplace_back(c.lo, c.hi);
    return out;
  }

  bool contains(std::span<const double> point, double tol = 0.0) const {
    if (point.size() != coords_.size()) return false;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (!(point[i] >= coords_[i].lo - tol && point[i] <= coords_[i].hi + tol)) return false;
    }
    return true;
  }

  /// Throws DomainError unless `point` has the right dimension and lies in
  /// the box. `what` names the point in the message.
  void require_contains(std::span<const double> point, std::string_view what) const {
    if (point.size() != coords_.size())
      throw DomainError(std::string(what) + " has dimension " + std::to_string(point.size()) +
                        ", expected " + std::to_string(coords_.size()));
    if (!contains(point)) throw DomainError(std::string(what) + " lies outside its box");
  }

  Assignment assignment(std::span<const double> point) const {
    if (point.size() != coords_.size()) throw StructuralError("point dimension does not match box");
    Assignment out;
    for (std::size_t i = 0; i < coords_.size(); ++i) out.emplace(coords_[i].name, point[i]);
    return out;
  }

  friend bool operator==(const BoxDomain&, const BoxDomain&) = default;

 private:
  std::vector<Coordinate> coords_;
};

}  // namespace gsiplab
