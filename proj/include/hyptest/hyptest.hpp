#ifndef HYPTEST_HYPTEST_HPP
#define HYPTEST_HYPTEST_HPP

#include "hyptest/bounds.hpp"
#include "hyptest/distributions.hpp"
#include "hyptest/errors.hpp"
#include "hyptest/random.hpp"
#include "hyptest/subgauss.hpp"
#include "hyptest/testing.hpp"

#endif  // HYPTEST_HYPTEST_HPP
