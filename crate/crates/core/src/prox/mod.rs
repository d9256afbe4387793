//! Norm-ball projections, the per-antenna PAPR and ACLR constraint sets, and
//! the smooth distortion term with its gradient.

mod balls;
mod sets;
mod smooth;

pub use balls::{proj_l2_ball, proj_linf_ball, proj_linf_ball_in_place};
pub use sets::{
    aclr_radii, papr_radii, proj_aclr_in_place, proj_aclr_set, proj_papr_in_place, proj_papr_set,
    update_set_radii, AclrSetSpec, PaprSetSpec,
};
pub use smooth::{grad_h, grad_h_into, objective_h, objective_h_data};
