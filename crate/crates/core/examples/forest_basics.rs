//! The forest on its own: train, score, evaluate and persist.
//!
//! cargo run --release --example forest_basics

use curriculum_graph::forest::{
    evaluate, stratified_split, train, Dataset, ForestConfig, ForestModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // the label depends on x0 + x1; x2 is noise
    let rows: Vec<Vec<f64>> = (0..600)
        .map(|_| vec![rng.gen(), rng.gen(), rng.gen()])
        .collect();
    let labels: Vec<bool> = rows
        .iter()
        .map(|r| r[0] + r[1] + rng.gen_range(-0.3..0.3) > 1.3)
        .collect();
    let data = Dataset::from_rows(vec!["x0".into(), "x1".into(), "x2".into()], &rows, labels)?;

    let split = stratified_split(data.labels(), 0.8, 1)?;
    let (train_set, test_set) = (
        data.select_rows(&split.train),
        data.select_rows(&split.test),
    );
    let model = train(
        &train_set,
        &ForestConfig {
            n_trees: 200,
            seed: 1,
            ..Default::default()
        },
    )?;
    let metrics = evaluate(&model.predict_dataset(&test_set)?, test_set.labels(), 0.5)?;
    println!("{metrics:#?}");
    for (name, importance) in model.feature_importance() {
        println!("{name}: {importance:.3}");
    }

    let restored = ForestModel::from_json(&model.to_json())?;
    assert_eq!(
        restored.predict_dataset(&test_set)?,
        model.predict_dataset(&test_set)?
    );
    println!("model round-trips through JSON");
    Ok(())
}
