// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "spinframe/clifford.hpp"
#include "spinframe/dirac.hpp"
#include "spinframe/domain.hpp"
#include "spinframe/eigensolver.hpp"
#include "spinframe/fft.hpp"
#include "spinframe/framing.hpp"
#include "spinframe/verify.hpp"
