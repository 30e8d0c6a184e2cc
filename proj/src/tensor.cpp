#include "epictrl/tensor.hpp"

#include <functional>
#include <numeric>
#include <utility>

namespace epictrl {

std::size_t element_count(const std::vector<std::size_t>& shape)
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<std::size_t>());
}

Tensor::Tensor(std::vector<std::size_t> dims, double fill)
    : shape(std::move(dims)), data(element_count(shape), fill)
{
}

} // namespace epictrl
