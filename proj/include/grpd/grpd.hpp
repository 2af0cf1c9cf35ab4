#pragma once

#include "grpd/cone.hpp"
#include "grpd/cone_algebra.hpp"
#include "grpd/convolution.hpp"
#include "grpd/cotangent.hpp"
#include "grpd/demos.hpp"
#include "grpd/distribution.hpp"
#include "grpd/errors.hpp"
#include "grpd/fft.hpp"
#include "grpd/groupoid.hpp"
#include "grpd/io.hpp"
#include "grpd/parallel.hpp"
#include "grpd/scenario.hpp"
#include "grpd/stencil.hpp"
#include "grpd/wavefront.hpp"
