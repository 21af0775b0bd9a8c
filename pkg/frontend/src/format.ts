/** Render a score exactly as the server serializes it: six decimals.
 *
 * The server prints every float with six decimal places, so any number
 * the client receives is the parse of such a string. Formatting it back
 * with toFixed(6) reproduces the original text byte-for-byte — a
 * six-decimal literal survives the round trip through a double because
 * the nearest double is far closer to it than to any neighboring
 * six-decimal value. The one exception is "-0.000000", which parses to
 * negative zero and would lose its sign, hence the Object.is guard.
 */
export function fmt6(value: number): string {
  const text = value.toFixed(6);
  if (Object.is(value, -0) && !text.startsWith("-")) {
    return "-" + text;
  }
  return text;
}
