// SPDX-License-Identifier: Apache-2.0
#include "psoa/classify.hpp"

namespace psoa {

AtomCategory classify_atom(const Psoa& atom) {
  AtomCategory c;
  for (const auto& d : atom.descriptors) {
    if (d.is_tuple())
      (d.dependent() ? c.m_dep : c.m_indep)++;
    else
      (d.dependent() ? c.k_dep : c.k_indep)++;
  }
  c.d1 = atom.oidful() ? OidDimension::Oidful : OidDimension::Oidless;
  int m = c.m(), k = c.k();
  if (m == 0 && k == 0) {
    c.d2 = DescriptorKind::Descriptorless;
    c.d3 = Perspectivity::NotApplicable;
    if (atom.oidful()) c.common_name = "membership";
    return c;
  }
  c.d2 = k == 0 ? DescriptorKind::Tupled : (m == 0 ? DescriptorKind::Slotted : DescriptorKind::TupledSlotted);
  int dep = c.m_dep + c.k_dep, indep = c.m_indep + c.k_indep;
  c.d3 = dep == 0 ? Perspectivity::Perspeneutral
                  : (indep == 0 ? Perspectivity::Perspectival : Perspectivity::PerspeneutralPerspectival);

  const char* layer = c.d3 == Perspectivity::Perspeneutral ? "pn" : (c.d3 == Perspectivity::Perspectival ? "pv" : "pp");
  int row = c.d2 == DescriptorKind::Tupled ? 0 : (c.d2 == DescriptorKind::Slotted ? 1 : 2);
  int digit = row * 2 + (atom.oidful() ? 2 : 1);
  std::string label = std::string(layer) + std::to_string(digit);
  c.label = label;

  if (label == "pn2" && m == 1 && k == 0) c.common_name = "shelf";
  if (label == "pn4") c.common_name = "frame";
  if (label == "pn6" && m == 1 && k >= 1) c.common_name = "shelframe";
  if (label == "pv1" && m == 1 && k == 0) c.common_name = "relationship";
  if (label == "pv3") c.common_name = "pairship";
  if (label == "pv5" && m == 1 && k >= 1) c.common_name = "relpairship";
  return c;
}

const char* to_string(OidDimension d) { return d == OidDimension::Oidless ? "oidless" : "oidful"; }

const char* to_string(DescriptorKind d) {
  switch (d) {
    case DescriptorKind::Descriptorless: return "descriptorless";
    case DescriptorKind::Tupled: return "tupled";
    case DescriptorKind::Slotted: return "slotted";
    case DescriptorKind::TupledSlotted: return "tupled+slotted";
  }
  return "";
}

const char* to_string(Perspectivity d) {
  switch (d) {
    case Perspectivity::NotApplicable: return "n/a";
    case Perspectivity::Perspeneutral: return "perspeneutral";
    case Perspectivity::Perspectival: return "perspectival";
    case Perspectivity::PerspeneutralPerspectival: return "perspeneutral+perspectival";
  }
  return "";
}

std::string AtomCategory::to_string() const {
  std::string s = "D0(m=" + std::to_string(m()) + ",k=" + std::to_string(k()) + ") " + psoa::to_string(d1) + " " +
                  psoa::to_string(d2) + " " + psoa::to_string(d3);
  if (label) s += " " + *label;
  if (common_name) s += " (" + *common_name + ")";
  return s;
}

}  // namespace psoa
