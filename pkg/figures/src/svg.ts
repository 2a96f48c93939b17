/** Tiny deterministic SVG chart toolkit (no DOM, plain string assembly). */

export interface Scale {
  (value: number): number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function log10Scale(d0: number, d1: number, r0: number, r1: number): Scale {
  const base = linearScale(Math.log10(d0), Math.log10(d1), r0, r1);
  return (v) => base(Math.log10(v));
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const fmt = (x: number) => (Math.round(x * 100) / 100).toString();

export class SvgChart {
  readonly width: number;
  readonly height: number;
  private parts: string[] = [];

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
  }

  line(x1: number, y1: number, x2: number, y2: number, style: string): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${style}/>`,
    );
  }

  polyline(points: Array<[number, number]>, style: string): void {
    const joined = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polyline fill="none" points="${joined}" ${style}/>`);
  }

  circle(x: number, y: number, r: number, style: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" ${style}/>`);
  }

  text(x: number, y: number, content: string, style = ""): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="sans-serif" ${style}>${esc(content)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export const AXIS_STYLE = 'stroke="#222" stroke-width="1"';
export const GRID_STYLE = 'stroke="#ddd" stroke-width="0.5"';
export const REF_STYLE = 'stroke="#888" stroke-width="1" stroke-dasharray="6 3"';
