// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "psoa/ast.hpp"

namespace psoa {

enum class OidDimension { Oidless, Oidful };
enum class DescriptorKind { Descriptorless, Tupled, Slotted, TupledSlotted };
enum class Perspectivity { NotApplicable, Perspeneutral, Perspectival, PerspeneutralPerspectival };

struct AtomCategory {
  // 4-bag D0 counts; m = m_dep + m_indep, k = k_dep + k_indep.
  int m_dep = 0, m_indep = 0, k_dep = 0, k_indep = 0;
  OidDimension d1 = OidDimension::Oidless;
  DescriptorKind d2 = DescriptorKind::Descriptorless;
  Perspectivity d3 = Perspectivity::NotApplicable;
  std::optional<std::string> label;        // pn1 .. pp6
  std::optional<std::string> common_name;  // relationship, frame, ...

  int m() const { return m_dep + m_indep; }
  int k() const { return k_dep + k_indep; }
  std::string to_string() const;
};

AtomCategory classify_atom(const Psoa& atom);

const char* to_string(OidDimension d);
const char* to_string(DescriptorKind d);
const char* to_string(Perspectivity d);

}  // namespace psoa
