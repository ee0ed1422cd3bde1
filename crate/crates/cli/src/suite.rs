//! Scenario documents packaged with the binary for `paper-suite`.

pub const PAPER_SUITE: &[(&str, &str)] = &[
    ("bochner_plane2", include_str!("../suite/bochner_plane2.json")),
    ("bochner_sphere2", include_str!("../suite/bochner_sphere2.json")),
    ("caloric_plane1_k0", include_str!("../suite/caloric_plane1_k0.json")),
    ("caloric_plane1_k1", include_str!("../suite/caloric_plane1_k1.json")),
    ("caloric_plane1_k2", include_str!("../suite/caloric_plane1_k2.json")),
    ("caloric_plane1_k3", include_str!("../suite/caloric_plane1_k3.json")),
    ("caloric_plane1_k4", include_str!("../suite/caloric_plane1_k4.json")),
    ("caloric_plane1_k5", include_str!("../suite/caloric_plane1_k5.json")),
    ("caloric_plane2_k0", include_str!("../suite/caloric_plane2_k0.json")),
    ("caloric_plane2_k1", include_str!("../suite/caloric_plane2_k1.json")),
    ("caloric_plane2_k2", include_str!("../suite/caloric_plane2_k2.json")),
    ("caloric_plane2_k3", include_str!("../suite/caloric_plane2_k3.json")),
    ("caloric_plane2_k4", include_str!("../suite/caloric_plane2_k4.json")),
    ("caloric_plane2_k5", include_str!("../suite/caloric_plane2_k5.json")),
    ("eigenvalue_cylinder11", include_str!("../suite/eigenvalue_cylinder11.json")),
    ("eigenvalue_plane2", include_str!("../suite/eigenvalue_plane2.json")),
    ("eigenvalue_sphere2", include_str!("../suite/eigenvalue_sphere2.json")),
    ("general_scalar_c0", include_str!("../suite/general_scalar_c0.json")),
    ("general_scalar_c0p1", include_str!("../suite/general_scalar_c0p1.json")),
    ("general_scalar_c1", include_str!("../suite/general_scalar_c1.json")),
    ("mixed_cylinder11", include_str!("../suite/mixed_cylinder11.json")),
    ("mixed_plane2", include_str!("../suite/mixed_plane2.json")),
    ("mixed_sphere2", include_str!("../suite/mixed_sphere2.json")),
    ("mixtures_cylinder11", include_str!("../suite/mixtures_cylinder11.json")),
    ("mixtures_plane2", include_str!("../suite/mixtures_plane2.json")),
    ("mixtures_sphere2", include_str!("../suite/mixtures_sphere2.json")),
    ("sphere10_k0", include_str!("../suite/sphere10_k0.json")),
    ("sphere10_k1", include_str!("../suite/sphere10_k1.json")),
    ("sphere10_k2", include_str!("../suite/sphere10_k2.json")),
    ("sphere10_k3", include_str!("../suite/sphere10_k3.json")),
    ("sphere10_k4", include_str!("../suite/sphere10_k4.json")),
    ("sphere1_k0", include_str!("../suite/sphere1_k0.json")),
    ("sphere1_k1", include_str!("../suite/sphere1_k1.json")),
    ("sphere1_k2", include_str!("../suite/sphere1_k2.json")),
    ("sphere1_k3", include_str!("../suite/sphere1_k3.json")),
    ("sphere1_k4", include_str!("../suite/sphere1_k4.json")),
    ("sphere2_k0", include_str!("../suite/sphere2_k0.json")),
    ("sphere2_k1", include_str!("../suite/sphere2_k1.json")),
    ("sphere2_k1_harnack", include_str!("../suite/sphere2_k1_harnack.json")),
    ("sphere2_k2", include_str!("../suite/sphere2_k2.json")),
    ("sphere2_k2_frozen_kappa", include_str!("../suite/sphere2_k2_frozen_kappa.json")),
    ("sphere2_k3", include_str!("../suite/sphere2_k3.json")),
    ("sphere2_k4", include_str!("../suite/sphere2_k4.json")),
    ("sphere5_k0", include_str!("../suite/sphere5_k0.json")),
    ("sphere5_k1", include_str!("../suite/sphere5_k1.json")),
    ("sphere5_k2", include_str!("../suite/sphere5_k2.json")),
    ("sphere5_k3", include_str!("../suite/sphere5_k3.json")),
    ("sphere5_k4", include_str!("../suite/sphere5_k4.json")),
    ("weighted_plane1", include_str!("../suite/weighted_plane1.json")),
    ("weighted_sphere2", include_str!("../suite/weighted_sphere2.json")),
    ("zero_data_plane1", include_str!("../suite/zero_data_plane1.json")),
];
