#pragma once

#include <filesystem>
#include <iosfwd>

#include "dtue/network.hpp"

namespace dtue {

// JSON network schema: sections `stations`, `lines`, `od_demand`, `routes`.
NetworkDef read_network_json(std::istream& in, const std::string& what);
NetworkDef load_network_def(const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

void write_network_json(std::ostream& out, const Network& net);

} // namespace dtue
