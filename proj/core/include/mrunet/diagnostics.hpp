#pragma once

#include <cstddef>
#include <cstdint>

#include "mrunet/gradcheck.hpp"
#include "mrunet/net.hpp"

namespace mrunet {

/// Gradient check of the soft-Dice loss of a network in double precision, over
/// every parameter. Weights come from build_model(spec, seed); biases are drawn
/// from U(-0.05, 0.05) so that no ReLU input sits exactly on its kink. The input
/// is a seeded random batch of `batch` x in_channels x size x size with a random
/// binary mask.
GradCheckReport model_loss_grad_check(const ArchitectureSpec& spec, std::size_t size, std::uint64_t seed,
                                      double step, std::size_t batch = 1);

} // namespace mrunet
