#ifndef SOSM_SOSM_HPP
#define SOSM_SOSM_HPP

#include "sosm/model.hpp"
#include "sosm/parse.hpp"
#include "sosm/export.hpp"
#include "sosm/matrix.hpp"
#include "sosm/emergence.hpp"
#include "sosm/clustering.hpp"
#include "sosm/compatibility.hpp"
#include "sosm/governance.hpp"
#include "sosm/timeline.hpp"

#endif
