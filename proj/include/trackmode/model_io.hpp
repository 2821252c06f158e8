#ifndef TRACKMODE_MODEL_IO_HPP
#define TRACKMODE_MODEL_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "trackmode/pipeline.hpp"

namespace trackmode {

/// Self-describing text container: format version, resolved configuration,
/// the person split, per-feature cut points, and every parameter tensor
/// (name, dimensions, row-major shortest-round-trip decimals). Values
/// reload bit-exactly.
void save_model(std::ostream& out, const Model& model,
                const std::vector<std::string>& provenance_lines = {});

Model load_model(std::istream& in);

} // namespace trackmode

#endif // TRACKMODE_MODEL_IO_HPP
