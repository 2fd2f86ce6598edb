//! Build a job document, write it out, read it back and answer its queries.

use procat::categories::{Category, FinSetMorphism, FinSetObject};
use procat::cli::{answer_all, parse_document, serialize_document, Query, Workspace};
use procat::deciders::Property;
use procat::prosys::{InverseSystem, LevelMorphism, Tail};

fn main() {
    let two = FinSetObject::new(["a", "b"]).unwrap();
    let three = FinSetObject::new(["x", "y", "z"]).unwrap();
    let x = InverseSystem::constant(Category::FinSet, two.clone().into()).unwrap();
    let y = InverseSystem::constant(Category::FinSet, three.clone().into()).unwrap();
    let f = FinSetMorphism::from_labels(two, three, &[("a", "x"), ("b", "z")]).unwrap();
    let f = LevelMorphism::new(x, y, vec![f.into()], Tail::Periodic).unwrap();

    let mut ws = Workspace::new(Category::FinSet);
    ws.add_morphism("include", &f);
    for p in [Property::StrongMono, Property::Epi] {
        ws.queries.push(Query { property: p, subject: "include".into(), horizon: None });
    }
    let text = serialize_document(&ws).unwrap();
    println!("{}", text);

    let parsed = parse_document(&text).unwrap();
    assert_eq!(parsed, ws);
    for r in answer_all(&parsed, &parsed.queries) {
        let r = r.unwrap();
        println!("{} {}: {} {}", r.property, r.subject, r.verdict, r.detail);
    }
}
