//! The teacher-weight schedule and the curriculum mix it drives.
//!
//! ```bash
//! cargo run --example curriculum_schedule
//! ```

use ndarray::array;
use touchlink::curriculum::{curriculum_mix, CurriculumSchedule};

fn main() -> anyhow::Result<()> {
    let schedule = CurriculumSchedule::new(0.9, 0.0, 100, true)?;
    println!("linear decay from beta_start=0.9 to beta_min=0 over 100 steps:");
    println!("{:>6} {:>8}", "step", "beta");
    for step in [0usize, 10, 25, 50, 75, 90, 100] {
        println!("{:>6} {:>8.4}", step, schedule.beta_at_step(step)?);
    }

    let ablation = CurriculumSchedule::disabled(100);
    println!("\nablation arm (schedule disabled): beta identically {}", ablation.beta_at_step(37)?);

    // The mix interpolates teacher (vision) and student (touch) rows.
    let teacher = array![1.0, 0.0];
    let student = array![0.0, 1.0];
    println!("\nmix of teacher (1,0) and student (0,1):");
    for beta in [1.0, 0.9, 0.5, 0.1, 0.0] {
        let mixed = curriculum_mix(teacher.view(), student.view(), beta)?;
        println!("  beta={beta:>4}: ({:.2}, {:.2})", mixed[0], mixed[1]);
    }
    Ok(())
}
