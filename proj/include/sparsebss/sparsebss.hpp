#ifndef SPARSEBSS_SPARSEBSS_HPP
#define SPARSEBSS_SPARSEBSS_HPP

#include "sparsebss/core.hpp"
#include "sparsebss/whitening.hpp"
#include "sparsebss/headings.hpp"
#include "sparsebss/clustering.hpp"
#include "sparsebss/separation.hpp"
#include "sparsebss/simgen.hpp"
#include "sparsebss/evaluation.hpp"
#include "sparsebss/io.hpp"

#endif  // SPARSEBSS_SPARSEBSS_HPP
