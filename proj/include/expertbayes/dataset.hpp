#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expertbayes/network.hpp"

namespace expertbayes {

struct Column {
  std::string name;
  std::vector<std::string> states;

  std::optional<std::size_t> state_index(std::string_view label) const;

  friend bool operator==(const Column&, const Column&) = default;
};

// Categorical observations. Cells hold state indices into their column's
// state list, or kMissing.
class Dataset {
 public:
  // Throws Error(InvalidArgument) for out-of-range cells or a ragged cell
  // count, Error(MissingClassColumn) for a bad class index and
  // Error(SingleStateClass) when the class has fewer than two states.
  Dataset(std::vector<Column> columns, std::vector<int> cells, std::size_t class_column);

  std::size_t row_count() const noexcept { return columns_.empty() ? 0 : cells_.size() / columns_.size(); }
  std::size_t column_count() const noexcept { return columns_.size(); }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  const Column& column(std::size_t index) const { return columns_.at(index); }
  std::size_t class_column() const noexcept { return class_column_; }
  const Column& class_info() const { return columns_[class_column_]; }

  int cell(std::size_t row, std::size_t column) const {
    return cells_[row * columns_.size() + column];
  }
  std::span<const int> row(std::size_t index) const {
    return std::span<const int>(cells_).subspan(index * columns_.size(), columns_.size());
  }

  std::optional<std::size_t> column_index(std::string_view name) const;

  // Rows in the given order; column state sets are kept whole so every
  // subset shares one layout.
  Dataset subset(std::span<const std::size_t> rows) const;

  // Copy with one cell replaced.
  Dataset with_cell(std::size_t row, std::size_t column, int value) const;

 private:
  std::vector<Column> columns_;
  std::vector<int> cells_;
  std::size_t class_column_;
};

// Dataset cells re-indexed onto a network's variables and state order.
// Extra dataset columns are ignored.
class BoundData {
 public:
  // Throws Error(ColumnMismatch) when a network variable has no column or a
  // column carries a label the variable does not declare.
  BoundData(const NetworkStructure& structure, const Dataset& data);

  std::size_t row_count() const noexcept { return rows_; }
  std::size_t variable_count() const noexcept { return vars_; }
  std::span<const int> row(std::size_t index) const {
    return std::span<const int>(cells_).subspan(index * vars_, vars_);
  }
  int cell(std::size_t row, std::size_t variable) const { return cells_[row * vars_ + variable]; }

 private:
  std::size_t rows_ = 0;
  std::size_t vars_ = 0;
  std::vector<int> cells_;
};

// Variables named and ordered like the dataset's columns.
std::vector<Variable> variables_of(const Dataset& data);

}  // namespace expertbayes
