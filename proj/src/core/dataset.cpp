#include "expertbayes/dataset.hpp"

#include "expertbayes/error.hpp"

namespace expertbayes {

std::optional<std::size_t> Column::state_index(std::string_view label) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == label) return i;
  }
  return std::nullopt;
}

Dataset::Dataset(std::vector<Column> columns, std::vector<int> cells, std::size_t class_column)
    : columns_(std::move(columns)), cells_(std::move(cells)), class_column_(class_column) {
  if (columns_.empty()) throw Error(ErrorCode::InvalidArgument, "dataset has no columns");
  if (cells_.size() % columns_.size() != 0) {
    throw Error(ErrorCode::InvalidArgument, "cell count is not a multiple of the column count");
  }
  if (class_column_ >= columns_.size()) {
    throw Error(ErrorCode::MissingClassColumn, "class column index out of range");
  }
  if (columns_[class_column_].states.size() < 2) {
    throw Error(ErrorCode::SingleStateClass,
                "class column '" + columns_[class_column_].name + "' has fewer than two states");
  }
  const std::size_t width = columns_.size();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const int v = cells_[i];
    if (v != kMissing && (v < 0 || static_cast<std::size_t>(v) >= columns_[i % width].states.size())) {
      throw Error(ErrorCode::InvalidArgument, "cell state index out of range");
    }
  }
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<int> cells;
  cells.reserve(rows.size() * columns_.size());
  for (std::size_t r : rows) {
    if (r >= row_count()) throw Error(ErrorCode::InvalidArgument, "row index out of range");
    const auto src = row(r);
    cells.insert(cells.end(), src.begin(), src.end());
  }
  return Dataset(columns_, std::move(cells), class_column_);
}

Dataset Dataset::with_cell(std::size_t row, std::size_t column, int value) const {
  std::vector<int> cells = cells_;
  cells.at(row * columns_.size() + column) = value;
  return Dataset(columns_, std::move(cells), class_column_);
}

BoundData::BoundData(const NetworkStructure& structure, const Dataset& data)
    : rows_(data.row_count()), vars_(structure.size()) {
  // translation[v][dataset state] -> network state
  std::vector<std::size_t> source(vars_);
  std::vector<std::vector<int>> translation(vars_);
  for (std::size_t v = 0; v < vars_; ++v) {
    const Variable& var = structure.variable(v);
    const auto col = data.column_index(var.name);
    if (!col) {
      throw Error(ErrorCode::ColumnMismatch, "dataset has no column for variable '" + var.name + "'");
    }
    source[v] = *col;
    for (const auto& label : data.column(*col).states) {
      const auto idx = var.state_index(label);
      if (!idx) {
        throw Error(ErrorCode::ColumnMismatch,
                    "label '" + label + "' is not a state of variable '" + var.name + "'");
      }
      translation[v].push_back(static_cast<int>(*idx));
    }
  }
  cells_.resize(rows_ * vars_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t v = 0; v < vars_; ++v) {
      const int raw = data.cell(r, source[v]);
      cells_[r * vars_ + v] = raw == kMissing ? kMissing : translation[v][static_cast<std::size_t>(raw)];
    }
  }
}

std::vector<Variable> variables_of(const Dataset& data) {
  std::vector<Variable> vars;
  vars.reserve(data.column_count());
  for (const Column& c : data.columns()) vars.push_back(Variable{c.name, c.states});
  return vars;
}

}  // namespace expertbayes
