#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tissue/types.hpp"

namespace tissue {

class TissueCompartment;

enum class CellType { type1, type2 };

/// An agent resident in a compartment. The scheduler bumps iterations() and
/// then calls cycle() exactly once per tick.
class Cell {
 public:
  explicit Cell(CellType type) : type_(type) {}
  virtual ~Cell() = default;

  Cell(const Cell&) = delete;
  Cell& operator=(const Cell&) = delete;

  CellId id() const noexcept { return id_; }
  CellType type() const noexcept { return type_; }
  std::int64_t iterations() const noexcept { return iterations_; }
  /// Opaque placement token; carries no spatial meaning.
  std::size_t position() const noexcept { return position_; }

  virtual void cycle(TissueCompartment& tissue) = 0;

  /// Antigen currently owned by the cell (internal stores, producers).
  virtual std::size_t antigen_held() const { return 0; }

  /// Receptor values recorded by probes; empty means the cell is not probed.
  virtual std::vector<Syscall> probe_values() const { return {}; }

 protected:
  void reset_iterations() noexcept { iterations_ = 0; }

 private:
  friend class TissueCompartment;

  CellId id_ = 0;
  CellType type_;
  std::int64_t iterations_ = 0;
  std::size_t position_ = 0;
};

}  // namespace tissue
