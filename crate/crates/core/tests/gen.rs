use pb_core::gen::{
    gen_instance, gen_profile, hidden_partition_is_complete, GenParams, ProfileKind,
};
use pb_core::model::{check_feasibility, to_canonical_json};

#[test]
fn same_seed_same_output() {
    for kind in [
        ProfileKind::General,
        ProfileKind::Def3,
        ProfileKind::WithComplements,
    ] {
        let p = GenParams::default().with_seed(42).with_kind(kind);
        let a = gen_instance(&p).unwrap();
        let b = gen_instance(&p).unwrap();
        assert_eq!(
            to_canonical_json(&a.to_file()),
            to_canonical_json(&b.to_file())
        );
        assert_eq!(gen_profile(&a, &p), gen_profile(&b, &p));
    }
}

#[test]
fn seeds_differ() {
    let a = gen_instance(&GenParams::default().with_seed(1)).unwrap();
    let b = gen_instance(&GenParams::default().with_seed(2)).unwrap();
    assert_ne!(
        to_canonical_json(&a.to_file()),
        to_canonical_json(&b.to_file())
    );
}

#[test]
fn generated_instances_respect_params() {
    let p = GenParams {
        projects: (4, 7),
        budget: (3, 6),
        cost: (1, 3),
        max_group_size: 2,
        ..GenParams::default()
    };
    for seed in 0..100 {
        let inst = gen_instance(&p.clone().with_seed(seed)).unwrap();
        assert!((4..=7).contains(&inst.projects().len()));
        assert!((3..=6).contains(&inst.budget()));
        assert!(inst.projects().iter().all(|x| (1..=3).contains(&x.cost)));
        assert!(inst.max_group_size() <= 2);
        assert!(inst.is_laminar());
        assert!(check_feasibility(&inst));
        let prof = gen_profile(
            &inst,
            &p.clone().with_seed(seed).with_kind(ProfileKind::Def3),
        );
        for g in inst.groups() {
            assert!(hidden_partition_is_complete(
                &inst,
                &prof.hidden[&g.id],
                g.id
            ));
        }
    }
}

#[test]
fn singleton_kind_has_singleton_groups() {
    let p = GenParams::default().with_kind(ProfileKind::SingletonGroups);
    for seed in 0..50 {
        let inst = gen_instance(&p.clone().with_seed(seed)).unwrap();
        assert_eq!(inst.max_group_size(), 1);
    }
}
