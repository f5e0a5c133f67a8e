#pragma once

#include <json.hpp>
#include <sstream>
#include <string>

#include "roadmot/eval/clearmot.hpp"

namespace roadmot {

// Flat key-value rendering, one `key value` pair per line, fixed key order.
inline std::string report_to_text(const MOTReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << "mota " << r.mota << '\n'
     << "motp " << r.motp << '\n'
     << "recall " << r.recall << '\n'
     << "precision " << r.precision << '\n'
     << "mt " << r.mt << '\n'
     << "pt " << r.pt << '\n'
     << "ml " << r.ml << '\n'
     << "tp " << r.tp << '\n'
     << "fp " << r.fp << '\n'
     << "fn " << r.fn << '\n'
     << "ids " << r.ids << '\n'
     << "frag " << r.frag << '\n'
     << "gt_count " << r.gt_count << '\n';
  return os.str();
}

inline nlohmann::ordered_json report_to_json(const MOTReport& r) {
  nlohmann::ordered_json j;
  j["mota"] = r.mota;
  j["motp"] = r.motp;
  j["recall"] = r.recall;
  j["precision"] = r.precision;
  j["mt"] = r.mt;
  j["pt"] = r.pt;
  j["ml"] = r.ml;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["ids"] = r.ids;
  j["frag"] = r.frag;
  j["gt_count"] = r.gt_count;
  return j;
}

}  // namespace roadmot
