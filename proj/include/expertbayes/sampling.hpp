#pragma once

#include <cstddef>

#include "expertbayes/dataset.hpp"
#include "expertbayes/network.hpp"
#include "expertbayes/random.hpp"

namespace expertbayes {

// Forward (ancestral) sampling. Columns mirror the network's variables and
// declared state order; the class column is the network's class.
Dataset sample_dataset(const Network& network, std::size_t rows, Rng& rng);

}  // namespace expertbayes
