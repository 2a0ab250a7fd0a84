#pragma once

#include <sstream>
#include <string>

#include "npls/engine.hpp"

namespace npls {

// One event per line, fixed field order:
//   t=<ms> kind=<kind> norm=<id|-> instance=<n|-> agent=<id|-> payload=<term|->
inline std::string trace_line(const NormEvent& e,
                              const std::string& agent_override = "") {
  std::ostringstream os;
  os << "t=" << e.t << " kind=" << to_keyword(e.kind);
  os << " norm=" << (e.norm_id.empty() ? "-" : e.norm_id);
  os << " instance=";
  if (e.instance_id)
    os << e.instance_id;
  else
    os << '-';
  const std::string& agent = agent_override.empty() ? e.agent : agent_override;
  os << " agent=" << (agent.empty() ? "-" : agent);
  os << " payload=";
  if (e.payload)
    print_term(os, *e.payload);
  else
    os << '-';
  return os.str();
}

}  // namespace npls
