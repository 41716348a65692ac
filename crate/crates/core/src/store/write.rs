use std::io::{self, Write};

use crate::store::{Format, Ontology, RawTriple, Term};

fn write_resource<W: Write>(w: &mut W, iri: &str) -> io::Result<()> {
    if iri.starts_with("_:") {
        w.write_all(iri.as_bytes())
    } else {
        write!(w, "<{iri}>")
    }
}

pub fn write_triples<'a, W, I>(mut w: W, triples: I, format: Format) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a RawTriple>,
{
    for t in triples {
        match format {
            Format::NTriples => {
                write_resource(&mut w, &t.subject)?;
                w.write_all(b" ")?;
                write_resource(&mut w, &t.predicate)?;
                w.write_all(b" ")?;
                match &t.object {
                    Term::Iri(o) => write_resource(&mut w, o)?,
                    Term::Literal(l) => write!(w, "{l}")?,
                }
                w.write_all(b" .\n")?;
            }
            Format::Tsv => writeln!(w, "{}\t{}\t{}", t.subject, t.predicate, t.object)?,
        }
    }
    Ok(())
}

pub fn write_ntriples<W: Write>(w: W, ontology: &Ontology) -> io::Result<()> {
    write_triples(w, &ontology.to_raw_triples(), Format::NTriples)
}

pub fn write_tsv<W: Write>(w: W, ontology: &Ontology) -> io::Result<()> {
    write_triples(w, &ontology.to_raw_triples(), Format::Tsv)
}

/// One CSV row of entity, statement and relation counts per named ontology.
pub fn write_stats_csv<W: Write>(mut w: W, ontologies: &[(&str, &Ontology)]) -> io::Result<()> {
    writeln!(
        w,
        "ontology,entities,instances,classes,literals,statements,relations,class_instance_conflicts"
    )?;
    for (name, o) in ontologies {
        let s = o.stats();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            name,
            s.entities,
            s.instances,
            s.classes,
            s.literals,
            s.statements,
            s.relations,
            s.class_instance_conflicts
        )?;
    }
    Ok(())
}
