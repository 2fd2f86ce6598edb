//! Smith normal form of an integer matrix and the group it presents.

use procat::categories::FgAbObject;
use procat::zlinalg::{smith_normal_form, IntMatrix, InvariantFactors};

fn main() {
    let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
    let r = smith_normal_form(&a);
    println!("A =\n{}", a);
    println!("S = U·A·V =\n{}", r.s);
    println!("U·A·V == S: {}", r.u.mul(&a).unwrap().mul(&r.v).unwrap() == r.s);

    // Columns of A as relations on three generators.
    let g = FgAbObject::new(3, a.clone()).unwrap();
    println!("ℤ³ / columns of A ≅ {}", InvariantFactors::of_presentation(&a));
    println!("order: {:?}", g.order());
}
