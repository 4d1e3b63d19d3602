#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "ltn/data/table.hpp"

namespace ltn {

enum class SynthKind { ProtocolFlags, AttackCategories, ThreeClass, BeamRfs };

std::string to_string(SynthKind k);
SynthKind synth_kind_from_string(const std::string& s);

/// Schema of the tables synth_generate produces for `kind`.
Schema synth_schema(SynthKind kind);

/// Desk-scale stand-ins for the real datasets, deterministic per seed:
///  protocol_flags     protocol_type/flag pairs (udp and icmp always SF,
///                     tcp never) plus three numeric columns
///  attack_categories  Gaussian clusters, raw KDD connection labels of
///                     the five categories, a few duplicate and
///                     non-finite rows for clean() to remove
///  three_class        BENIGN/DDoS/PortScan clusters with CIC-IDS2017
///                     class proportions
///  beam_rfs           8 frequency-shift features of a damage position
///                     in [0, 1]
DatasetTable synth_generate(SynthKind kind, std::size_t n, std::uint64_t seed);

}  // namespace ltn
